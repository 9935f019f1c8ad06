//! Corpus loading, schema validation, and one-vs-rest binarization.
//!
//! A corpus is a list of documents, each carrying a set of labels drawn from
//! a hierarchical class schema (a forest). Labels are closed upward at load
//! time: a document labeled with a child class also carries every ancestor.
//! Each class then induces an independent binary task via [`Corpus::binarize`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error: {0}")]
    Schema(#[from] SchemaError),
    #[error("duplicate document id {id:?}")]
    DuplicateId { id: String },
    #[error("document {doc_id:?} carries label {label:?} not present in the schema")]
    UnknownLabel { doc_id: String, label: String },
    #[error("document {doc_id:?} carries label {label:?} without its ancestor {ancestor:?} (strict mode)")]
    MissingAncestor {
        doc_id: String,
        label: String,
        ancestor: String,
    },
    #[error("unknown class {class_id:?}")]
    UnknownClass { class_id: String },
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("duplicate class id {id:?}")]
    DuplicateClass { id: String },
    #[error("class {id:?} references unknown parent {parent:?}")]
    UnknownParent { id: String, parent: String },
    #[error("class {id:?} participates in a parent cycle")]
    Cycle { id: String },
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema file is not valid JSON: {0}")]
    Json(String),
}

/// One node of the class hierarchy. Root classes have no parent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassDef {
    pub id: String,
    pub parent: Option<String>,
}

/// A validated class forest: ids unique, parents resolve, no cycles.
#[derive(Debug, Clone)]
pub struct ClassSchema {
    classes: Vec<ClassDef>,
    index: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct SchemaFile {
    classes: Vec<ClassDef>,
}

impl ClassSchema {
    pub fn new(classes: Vec<ClassDef>) -> Result<Self, SchemaError> {
        let mut index = HashMap::new();
        for (i, class) in classes.iter().enumerate() {
            if index.insert(class.id.clone(), i).is_some() {
                return Err(SchemaError::DuplicateClass {
                    id: class.id.clone(),
                });
            }
        }
        for class in &classes {
            if let Some(parent) = &class.parent {
                if !index.contains_key(parent) {
                    return Err(SchemaError::UnknownParent {
                        id: class.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        let schema = ClassSchema { classes, index };
        for class in &schema.classes {
            let mut seen = HashSet::new();
            let mut cursor = Some(class.id.as_str());
            while let Some(id) = cursor {
                if !seen.insert(id) {
                    return Err(SchemaError::Cycle {
                        id: class.id.clone(),
                    });
                }
                cursor = schema.parent_of(id);
            }
        }
        Ok(schema)
    }

    /// Load from a JSON file: `{"classes": [{"id": ..., "parent": ...|null}, ...]}`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| SchemaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let parsed: SchemaFile = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| SchemaError::Json(e.to_string()))?;
        Self::new(parsed.classes)
    }

    pub fn contains(&self, class_id: &str) -> bool {
        self.index.contains_key(class_id)
    }

    pub fn class_ids(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().map(|c| c.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn parent_of(&self, class_id: &str) -> Option<&str> {
        let i = *self.index.get(class_id)?;
        self.classes[i].parent.as_deref()
    }

    /// Proper ancestors of a class, nearest first. Empty for roots.
    pub fn ancestors(&self, class_id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cursor = self.parent_of(class_id);
        while let Some(id) = cursor {
            out.push(id);
            cursor = self.parent_of(id);
        }
        out
    }
}

/// A single document: unique id, raw text, and its (closed) label set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub labels: BTreeSet<String>,
}

/// A validated, immutable corpus. Safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct Corpus {
    schema: Arc<ClassSchema>,
    documents: Vec<Document>,
    annotation_count: usize,
}

/// One-vs-rest binary task for a single class: one label per document row.
#[derive(Debug, Clone)]
pub struct LabeledTask {
    pub class_id: String,
    pub labels: Vec<bool>,
    pub positive_count: usize,
}

#[derive(Deserialize)]
struct LineDoc {
    id: String,
    text: String,
    labels: Vec<String>,
}

impl Corpus {
    /// Build a corpus from in-memory documents, validating against the schema.
    ///
    /// `labels` on the way in are the raw annotations; the annotation count
    /// reports their total (hierarchy closure does not add to it). With
    /// `strict` set, a child label whose ancestor is missing is an error
    /// instead of being closed silently.
    pub fn from_documents(
        schema: ClassSchema,
        documents: Vec<Document>,
        strict: bool,
    ) -> Result<Self, CorpusError> {
        let schema = Arc::new(schema);
        let mut seen_ids = HashSet::new();
        let mut annotation_count = 0;
        let mut closed = Vec::with_capacity(documents.len());
        for mut doc in documents {
            if !seen_ids.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId { id: doc.id });
            }
            for label in &doc.labels {
                if !schema.contains(label) {
                    return Err(CorpusError::UnknownLabel {
                        doc_id: doc.id.clone(),
                        label: label.clone(),
                    });
                }
            }
            annotation_count += doc.labels.len();
            let mut implied = Vec::new();
            for label in &doc.labels {
                for ancestor in schema.ancestors(label) {
                    if !doc.labels.contains(ancestor) {
                        if strict {
                            return Err(CorpusError::MissingAncestor {
                                doc_id: doc.id.clone(),
                                label: label.clone(),
                                ancestor: ancestor.to_string(),
                            });
                        }
                        implied.push(ancestor.to_string());
                    }
                }
            }
            doc.labels.extend(implied);
            closed.push(doc);
        }
        Ok(Corpus {
            schema,
            documents: closed,
            annotation_count,
        })
    }

    /// Load a JSON-lines corpus file: one `{"id", "text", "labels"}` object
    /// per line. Blank lines are ignored.
    pub fn load(
        path: impl AsRef<Path>,
        schema: ClassSchema,
        strict: bool,
    ) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut documents = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| CorpusError::Io {
                path: path.display().to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: LineDoc =
                serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
                    line: lineno + 1,
                    message: e.to_string(),
                })?;
            documents.push(Document {
                id: raw.id,
                text: raw.text,
                labels: raw.labels.into_iter().collect(),
            });
        }
        Self::from_documents(schema, documents, strict)
    }

    pub fn schema(&self) -> &ClassSchema {
        &self.schema
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    /// Total number of label assignments as given in the input (pre-closure).
    pub fn annotation_count(&self) -> usize {
        self.annotation_count
    }

    /// One-vs-rest binarization: label is 1 iff the document carries `class_id`.
    pub fn binarize(&self, class_id: &str) -> Result<LabeledTask, CorpusError> {
        if !self.schema.contains(class_id) {
            return Err(CorpusError::UnknownClass {
                class_id: class_id.to_string(),
            });
        }
        let labels: Vec<bool> = self
            .documents
            .iter()
            .map(|d| d.labels.contains(class_id))
            .collect();
        let positive_count = labels.iter().filter(|&&b| b).count();
        Ok(LabeledTask {
            class_id: class_id.to_string(),
            labels,
            positive_count,
        })
    }

    /// Content digest over ids, texts, and closed label sets, in row order.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for doc in &self.documents {
            hasher.update(doc.id.as_bytes());
            hasher.update([0x1f]);
            hasher.update(doc.text.as_bytes());
            for label in &doc.labels {
                hasher.update([0x1f]);
                hasher.update(label.as_bytes());
            }
            hasher.update([0x1e]);
        }
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn demo_schema() -> ClassSchema {
        let defs = [
            ("no_distress", None),
            ("distress", None),
            ("sad_mood", Some("distress")),
            ("poor_sleep", Some("distress")),
        ];
        ClassSchema::new(
            defs.iter()
                .map(|(id, parent)| ClassDef {
                    id: id.to_string(),
                    parent: parent.map(str::to_string),
                })
                .collect(),
        )
        .unwrap()
    }

    fn doc(id: &str, text: &str, labels: &[&str]) -> Document {
        Document {
            id: id.to_string(),
            text: text.to_string(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn schema_rejects_duplicates_unknown_parents_and_cycles() {
        let dup = ClassSchema::new(vec![
            ClassDef { id: "a".into(), parent: None },
            ClassDef { id: "a".into(), parent: None },
        ]);
        assert!(matches!(dup, Err(SchemaError::DuplicateClass { .. })));

        let orphan = ClassSchema::new(vec![ClassDef {
            id: "a".into(),
            parent: Some("missing".into()),
        }]);
        assert!(matches!(orphan, Err(SchemaError::UnknownParent { .. })));

        let cycle = ClassSchema::new(vec![
            ClassDef { id: "a".into(), parent: Some("b".into()) },
            ClassDef { id: "b".into(), parent: Some("a".into()) },
        ]);
        assert!(matches!(cycle, Err(SchemaError::Cycle { .. })));
    }

    #[test]
    fn loads_three_line_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, r#"{{"id": "t1", "text": "rough day", "labels": ["no_distress"]}}"#).unwrap();
        writeln!(file, r#"{{"id": "t2", "text": "feeling down", "labels": ["sad_mood"]}}"#).unwrap();
        writeln!(file, r#"{{"id": "t3", "text": "all good", "labels": ["no_distress"]}}"#).unwrap();
        let corpus = Corpus::load(file.path(), demo_schema(), false).unwrap();
        assert_eq!(corpus.document_count(), 3);
        assert_eq!(corpus.annotation_count(), 3);
    }

    #[test]
    fn unknown_label_is_rejected_by_name() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, r#"{{"id": "t1", "text": "x", "labels": ["anxiety"]}}"#).unwrap();
        let err = Corpus::load(file.path(), demo_schema(), false).unwrap_err();
        match err {
            CorpusError::UnknownLabel { label, .. } => assert_eq!(label, "anxiety"),
            other => panic!("expected UnknownLabel, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_line_number() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, r#"{{"id": "t1", "text": "x", "labels": []}}"#).unwrap();
        writeln!(file, "not json").unwrap();
        let err = Corpus::load(file.path(), demo_schema(), false).unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let docs = vec![doc("t1", "a", &[]), doc("t1", "b", &[])];
        let err = Corpus::from_documents(demo_schema(), docs, false).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { .. }));
    }

    #[test]
    fn closure_adds_ancestors_and_strict_mode_rejects() {
        let docs = vec![doc("t1", "so tired", &["sad_mood"])];
        let corpus = Corpus::from_documents(demo_schema(), docs.clone(), false).unwrap();
        assert!(corpus.documents()[0].labels.contains("distress"));
        // Closure never touches the annotation count.
        assert_eq!(corpus.annotation_count(), 1);

        let err = Corpus::from_documents(demo_schema(), docs, true).unwrap_err();
        match err {
            CorpusError::MissingAncestor { ancestor, .. } => assert_eq!(ancestor, "distress"),
            other => panic!("expected MissingAncestor, got {other:?}"),
        }
    }

    #[test]
    fn binarize_matches_direct_membership() {
        let docs = vec![
            doc("t1", "", &["sad_mood"]),
            doc("t2", "", &["no_distress"]),
            doc("t3", "", &["no_distress"]),
            doc("t4", "", &["sad_mood"]),
            doc("t5", "", &["no_distress"]),
            doc("t6", "", &["distress"]),
        ];
        let corpus = Corpus::from_documents(demo_schema(), docs, false).unwrap();
        let task = corpus.binarize("sad_mood").unwrap();
        assert_eq!(task.labels, vec![true, false, false, true, false, false]);
        assert_eq!(task.positive_count, 2);

        let empty = corpus.binarize("poor_sleep").unwrap();
        assert_eq!(empty.positive_count, 0);
        assert!(empty.labels.iter().all(|&b| !b));

        assert!(matches!(
            corpus.binarize("nope"),
            Err(CorpusError::UnknownClass { .. })
        ));
    }

    #[test]
    fn subtype_positives_bounded_by_parent_after_closure() {
        let docs = vec![
            doc("t1", "", &["sad_mood"]),
            doc("t2", "", &["sad_mood", "poor_sleep"]),
            doc("t3", "", &["distress"]),
            doc("t4", "", &["no_distress"]),
        ];
        let corpus = Corpus::from_documents(demo_schema(), docs, false).unwrap();
        let parent = corpus.binarize("distress").unwrap().positive_count;
        let mood = corpus.binarize("sad_mood").unwrap().positive_count;
        let sleep = corpus.binarize("poor_sleep").unwrap().positive_count;
        assert!(mood <= parent);
        assert!(sleep <= parent);
        assert!(mood + sleep >= mood.max(sleep));
        assert_eq!(parent, 3);
    }

    #[test]
    fn empty_text_documents_are_retained() {
        let docs = vec![doc("t1", "", &["no_distress"]), doc("t2", "hi", &["distress"])];
        let corpus = Corpus::from_documents(demo_schema(), docs, false).unwrap();
        assert_eq!(corpus.document_count(), 2);
    }

    #[test]
    fn content_hash_is_stable_and_order_sensitive() {
        let a = Corpus::from_documents(
            demo_schema(),
            vec![doc("t1", "x", &["distress"]), doc("t2", "y", &["no_distress"])],
            false,
        )
        .unwrap();
        let b = Corpus::from_documents(
            demo_schema(),
            vec![doc("t1", "x", &["distress"]), doc("t2", "y", &["no_distress"])],
            false,
        )
        .unwrap();
        let c = Corpus::from_documents(
            demo_schema(),
            vec![doc("t2", "y", &["no_distress"]), doc("t1", "x", &["distress"])],
            false,
        )
        .unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), c.content_hash());
    }
}

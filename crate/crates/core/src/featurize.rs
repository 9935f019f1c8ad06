//! Binary feature encoding across the seven named feature groups.
//!
//! Every feature is presence-valued: a document either triggers a column or
//! it does not. Columns are the union of features observed in the corpus,
//! ordered by (group, name) so encoding is deterministic regardless of
//! worker count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::lexicon::LexiconSet;

#[derive(Debug, Error)]
pub enum FeaturizeError {
    #[error("no feature groups requested")]
    EmptyGroupSet,
    #[error("no lexicon loaded for requested group {group}")]
    MissingLexicon { group: FeatureGroup },
    #[error("duplicate feature {group}:{name} in registry")]
    DuplicateFeature { group: FeatureGroup, name: String },
    #[error("unknown feature group {0:?}")]
    UnknownGroup(String),
}

/// The seven feature groups. Declaration order fixes column ordering and
/// the order ablation conditions run in.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Lexical,
    Syntactic,
    Emotion,
    Demographic,
    Sentiment,
    Personality,
    Liwc,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 7] = [
        FeatureGroup::Lexical,
        FeatureGroup::Syntactic,
        FeatureGroup::Emotion,
        FeatureGroup::Demographic,
        FeatureGroup::Sentiment,
        FeatureGroup::Personality,
        FeatureGroup::Liwc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureGroup::Lexical => "lexical",
            FeatureGroup::Syntactic => "syntactic",
            FeatureGroup::Emotion => "emotion",
            FeatureGroup::Demographic => "demographic",
            FeatureGroup::Sentiment => "sentiment",
            FeatureGroup::Personality => "personality",
            FeatureGroup::Liwc => "liwc",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureGroup {
    type Err = FeaturizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "lexical" => Ok(FeatureGroup::Lexical),
            "syntactic" => Ok(FeatureGroup::Syntactic),
            "emotion" => Ok(FeatureGroup::Emotion),
            "demographic" => Ok(FeatureGroup::Demographic),
            "sentiment" => Ok(FeatureGroup::Sentiment),
            "personality" => Ok(FeatureGroup::Personality),
            "liwc" => Ok(FeatureGroup::Liwc),
            other => Err(FeaturizeError::UnknownGroup(other.to_string())),
        }
    }
}

/// Column metadata: which group a column belongs to and its display name,
/// e.g. `unigram=depressed`, `pos=V`, `emoticon=SAD`, `sent=strong_negative`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub column: usize,
    pub group: FeatureGroup,
    pub name: String,
}

/// Ordered column metadata; columns are contiguous from 0 and (group, name)
/// pairs are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRegistry {
    descriptors: Vec<FeatureDescriptor>,
}

impl FeatureRegistry {
    /// Build from (group, name) pairs in column order.
    pub fn new(
        features: impl IntoIterator<Item = (FeatureGroup, String)>,
    ) -> Result<Self, FeaturizeError> {
        let mut seen = BTreeSet::new();
        let mut descriptors = Vec::new();
        for (column, (group, name)) in features.into_iter().enumerate() {
            if !seen.insert((group, name.clone())) {
                return Err(FeaturizeError::DuplicateFeature { group, name });
            }
            descriptors.push(FeatureDescriptor { column, group, name });
        }
        Ok(FeatureRegistry { descriptors })
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.descriptors
    }

    pub fn descriptor(&self, column: usize) -> &FeatureDescriptor {
        &self.descriptors[column]
    }

    /// Column counts per group; all seven groups are present in the output
    /// (zero for groups with no columns), and the counts sum to `len()`.
    pub fn group_sizes(&self) -> BTreeMap<FeatureGroup, usize> {
        let mut sizes: BTreeMap<FeatureGroup, usize> =
            FeatureGroup::ALL.iter().map(|&g| (g, 0)).collect();
        for d in &self.descriptors {
            *sizes.get_mut(&d.group).unwrap() += 1;
        }
        sizes
    }

    /// Column counts remaining after holding out each group: total - size(g).
    pub fn sans_sizes(&self) -> BTreeMap<FeatureGroup, usize> {
        let total = self.len();
        self.group_sizes()
            .into_iter()
            .map(|(g, size)| (g, total - size))
            .collect()
    }

    /// Content digest of the column list, for audit trails.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for d in &self.descriptors {
            hasher.update(d.group.as_str().as_bytes());
            hasher.update([0x1f]);
            hasher.update(d.name.as_bytes());
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

/// Row-compressed sparse binary matrix: per row, the sorted column indices
/// that are present. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    registry: Arc<FeatureRegistry>,
    rows: Vec<Vec<usize>>,
}

impl FeatureMatrix {
    pub fn new(registry: FeatureRegistry, rows: Vec<Vec<usize>>) -> Self {
        let columns = registry.len();
        for row in &rows {
            debug_assert!(row.windows(2).all(|w| w[0] < w[1]), "row indices not sorted");
            debug_assert!(row.iter().all(|&c| c < columns), "column index out of range");
        }
        FeatureMatrix {
            registry: Arc::new(registry),
            rows,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> usize {
        self.registry.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.registry
    }

    /// Number of rows in which each column is present.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0usize; self.columns()];
        for row in &self.rows {
            for &c in row {
                df[c] += 1;
            }
        }
        df
    }

    /// Restrict to the given columns (ascending original indices),
    /// renumbering them contiguously and preserving order.
    pub fn restrict_columns(&self, keep: &[usize]) -> FeatureMatrix {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]), "keep list not ascending");
        let mut remap = vec![usize::MAX; self.columns()];
        let mut features = Vec::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
            let d = self.registry.descriptor(old);
            features.push((d.group, d.name.clone()));
        }
        let registry = FeatureRegistry::new(features)
            .expect("restriction of a valid registry stays valid");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter_map(|&c| (remap[c] != usize::MAX).then(|| remap[c]))
                    .collect()
            })
            .collect();
        FeatureMatrix {
            registry: Arc::new(registry),
            rows,
        }
    }

    /// Row subset in the given order; registry is shared, not copied.
    pub fn subset_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            registry: Arc::clone(&self.registry),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

/// Hold out one feature group: all other columns survive in order.
pub fn ablate(matrix: &FeatureMatrix, group: FeatureGroup) -> FeatureMatrix {
    let keep: Vec<usize> = matrix
        .registry()
        .descriptors()
        .iter()
        .filter(|d| d.group != group)
        .map(|d| d.column)
        .collect();
    matrix.restrict_columns(&keep)
}

fn document_features(
    tokens: &[crate::tokenize::Token],
    lexicons: &LexiconSet,
    groups: &BTreeSet<FeatureGroup>,
) -> BTreeSet<(FeatureGroup, String)> {
    let mut features = BTreeSet::new();
    for token in tokens {
        let surface = token.surface.as_str();
        if groups.contains(&FeatureGroup::Lexical) {
            features.insert((FeatureGroup::Lexical, format!("unigram={surface}")));
        }
        if groups.contains(&FeatureGroup::Syntactic) {
            if let Some(tag) = lexicons.pos_tag(surface) {
                features.insert((FeatureGroup::Syntactic, format!("pos={tag}")));
            }
        }
        if groups.contains(&FeatureGroup::Emotion) {
            if let Some(category) = lexicons.emoticon_category(surface) {
                features.insert((FeatureGroup::Emotion, format!("emoticon={category}")));
            }
        }
        if groups.contains(&FeatureGroup::Sentiment) {
            if let Some(entry) = lexicons.sentiment_entry(surface) {
                features.insert((
                    FeatureGroup::Sentiment,
                    format!("sent={}_{}", entry.polarity_strength, entry.polarity),
                ));
                features.insert((
                    FeatureGroup::Sentiment,
                    format!("sent={}_subjective", entry.subjectivity_strength),
                ));
            }
        }
        if groups.contains(&FeatureGroup::Liwc) {
            for category in lexicons.categories_for(surface) {
                features.insert((FeatureGroup::Liwc, format!("liwc={category}")));
            }
        }
    }
    if groups.contains(&FeatureGroup::Demographic) {
        for indicator in lexicons.demographic_indicators(tokens) {
            features.insert((FeatureGroup::Demographic, format!("demo={indicator}")));
        }
    }
    if groups.contains(&FeatureGroup::Personality) {
        for indicator in lexicons.personality_indicators(tokens) {
            features.insert((FeatureGroup::Personality, format!("trait={indicator}")));
        }
    }
    features
}

/// Encode every document over the requested groups. Columns are the union
/// of features observed anywhere in the corpus, in (group, name) order.
pub fn encode(
    corpus: &Corpus,
    lexicons: &LexiconSet,
    groups: &BTreeSet<FeatureGroup>,
) -> Result<FeatureMatrix, FeaturizeError> {
    if groups.is_empty() {
        return Err(FeaturizeError::EmptyGroupSet);
    }
    for &group in groups {
        if !lexicons.supports(group) {
            return Err(FeaturizeError::MissingLexicon { group });
        }
    }
    let tokenizer = lexicons.tokenizer();
    let per_doc: Vec<BTreeSet<(FeatureGroup, String)>> = corpus
        .documents()
        .par_iter()
        .map(|doc| document_features(&tokenizer.tokenize(&doc.text), lexicons, groups))
        .collect();

    // Deterministic merge: union is ordered by (group, name) regardless of
    // how the per-document pass was scheduled.
    let mut union: BTreeSet<(FeatureGroup, String)> = BTreeSet::new();
    for features in &per_doc {
        union.extend(features.iter().cloned());
    }
    let columns: BTreeMap<(FeatureGroup, String), usize> = union
        .iter()
        .enumerate()
        .map(|(i, key)| (key.clone(), i))
        .collect();
    let registry = FeatureRegistry::new(union.into_iter())?;
    let rows = per_doc
        .into_iter()
        .map(|features| {
            // BTreeSet iteration follows column order, so indices come out sorted.
            features.into_iter().map(|key| columns[&key]).collect()
        })
        .collect();
    Ok(FeatureMatrix::new(registry, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ClassDef, ClassSchema, Document};
    use crate::lexicon::{Polarity, SentimentEntry, Strength};
    use proptest::prelude::*;

    fn corpus_of(texts: &[&str]) -> Corpus {
        let schema =
            ClassSchema::new(vec![ClassDef { id: "c".into(), parent: None }]).unwrap();
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, text)| Document {
                id: format!("d{i}"),
                text: text.to_string(),
                labels: ["c".to_string()].into_iter().collect(),
            })
            .collect();
        Corpus::from_documents(schema, docs, false).unwrap()
    }

    fn groups(list: &[FeatureGroup]) -> BTreeSet<FeatureGroup> {
        list.iter().copied().collect()
    }

    fn names(matrix: &FeatureMatrix) -> Vec<&str> {
        matrix
            .registry()
            .descriptors()
            .iter()
            .map(|d| d.name.as_str())
            .collect()
    }

    #[test]
    fn lexical_encoding_is_binary_presence() {
        let corpus = corpus_of(&["sad sad day"]);
        let matrix = encode(&corpus, &LexiconSet::empty(), &groups(&[FeatureGroup::Lexical]))
            .unwrap();
        assert_eq!(names(&matrix), ["unigram=day", "unigram=sad"]);
        assert_eq!(matrix.row(0), &[0, 1]);
    }

    #[test]
    fn sentiment_terms_trigger_strength_columns() {
        let corpus = corpus_of(&["terrible"]);
        let lexicons = LexiconSet::empty().with_sentiment([(
            "terrible".to_string(),
            SentimentEntry {
                polarity: Polarity::Negative,
                polarity_strength: Strength::Strong,
                subjectivity_strength: Strength::Strong,
            },
        )]);
        let matrix = encode(&corpus, &lexicons, &groups(&[FeatureGroup::Sentiment])).unwrap();
        assert_eq!(names(&matrix), ["sent=strong_negative", "sent=strong_subjective"]);
        assert_eq!(matrix.row(0), &[0, 1]);
    }

    #[test]
    fn demographic_cue_phrase_triggers_indicator() {
        let corpus = corpus_of(&["out with my girlfriend"]);
        let lexicons = LexiconSet::empty()
            .with_demographic([("my girlfriend".to_string(), "gender_male".to_string())]);
        let matrix =
            encode(&corpus, &lexicons, &groups(&[FeatureGroup::Demographic])).unwrap();
        assert_eq!(names(&matrix), ["demo=gender_male"]);
    }

    #[test]
    fn missing_lexicon_error_names_the_group() {
        let corpus = corpus_of(&["hello"]);
        let err = encode(&corpus, &LexiconSet::empty(), &groups(&[FeatureGroup::Liwc]))
            .unwrap_err();
        match err {
            FeaturizeError::MissingLexicon { group } => assert_eq!(group, FeatureGroup::Liwc),
            other => panic!("expected MissingLexicon, got {other:?}"),
        }
    }

    #[test]
    fn empty_group_request_is_an_error() {
        let corpus = corpus_of(&["hello"]);
        assert!(matches!(
            encode(&corpus, &LexiconSet::empty(), &BTreeSet::new()),
            Err(FeaturizeError::EmptyGroupSet)
        ));
    }

    #[test]
    fn group_sizes_count_columns() {
        let features = (0..10)
            .map(|i| (FeatureGroup::Lexical, format!("unigram=w{i}")))
            .chain((0..2).map(|i| (FeatureGroup::Emotion, format!("emoticon=E{i}"))));
        let registry = FeatureRegistry::new(features).unwrap();
        let sizes = registry.group_sizes();
        assert_eq!(sizes[&FeatureGroup::Lexical], 10);
        assert_eq!(sizes[&FeatureGroup::Emotion], 2);
        assert_eq!(sizes[&FeatureGroup::Sentiment], 0);
        assert_eq!(sizes.values().sum::<usize>(), registry.len());
    }

    // A registry with the reference group sizes of a full seven-group run:
    // every sans-group count equals total minus that group's size.
    #[test]
    fn sans_sizes_on_reference_registry() {
        let sizes = [
            (FeatureGroup::Lexical, 16_773usize),
            (FeatureGroup::Syntactic, 23),
            (FeatureGroup::Emotion, 4),
            (FeatureGroup::Demographic, 12),
            (FeatureGroup::Sentiment, 8),
            (FeatureGroup::Personality, 12),
            (FeatureGroup::Liwc, 126),
        ];
        let features = sizes
            .iter()
            .flat_map(|&(g, n)| (0..n).map(move |i| (g, format!("{g}:{i}"))));
        let registry = FeatureRegistry::new(features).unwrap();
        assert_eq!(registry.len(), 16_958);
        let sans = registry.sans_sizes();
        assert_eq!(sans[&FeatureGroup::Lexical], 185);
        assert_eq!(sans[&FeatureGroup::Syntactic], 16_935);
        assert_eq!(sans[&FeatureGroup::Emotion], 16_954);
        assert_eq!(sans[&FeatureGroup::Demographic], 16_946);
        assert_eq!(sans[&FeatureGroup::Sentiment], 16_950);
        assert_eq!(sans[&FeatureGroup::Personality], 16_946);
        assert_eq!(sans[&FeatureGroup::Liwc], 16_832);
    }

    #[test]
    fn ablate_removes_exactly_the_group() {
        let corpus = corpus_of(&["sad day :(", "good day :)"]);
        let lexicons = LexiconSet::empty()
            .with_emoticons([(":(".to_string(), "SAD".to_string()), (":)".to_string(), "HAPPY".to_string())]);
        let matrix = encode(
            &corpus,
            &lexicons,
            &groups(&[FeatureGroup::Lexical, FeatureGroup::Emotion]),
        )
        .unwrap();
        let total = matrix.columns();
        let emotion = matrix.registry().group_sizes()[&FeatureGroup::Emotion];
        assert!(emotion > 0);

        let sans = ablate(&matrix, FeatureGroup::Emotion);
        assert_eq!(sans.columns(), total - emotion);
        assert_eq!(sans.rows(), matrix.rows());
        assert!(sans
            .registry()
            .descriptors()
            .iter()
            .all(|d| d.group != FeatureGroup::Emotion));

        // Ablating a group with zero columns is the identity.
        let unchanged = ablate(&matrix, FeatureGroup::Liwc);
        assert_eq!(unchanged.columns(), matrix.columns());
        assert_eq!(names(&unchanged), names(&matrix));
        for i in 0..matrix.rows() {
            assert_eq!(unchanged.row(i), matrix.row(i));
        }
    }

    #[test]
    fn every_column_is_observed_somewhere() {
        let corpus = corpus_of(&["alpha beta", "beta gamma", ""]);
        let matrix = encode(&corpus, &LexiconSet::empty(), &groups(&[FeatureGroup::Lexical]))
            .unwrap();
        let df = matrix.document_frequencies();
        assert!(df.iter().all(|&d| d >= 1));
        assert_eq!(matrix.rows(), 3);
        assert!(matrix.row(2).is_empty());
    }

    #[test]
    fn encoding_is_deterministic() {
        let corpus = corpus_of(&["feeling down :(", "mid semester exams", "sad sad day"]);
        let lexicons = LexiconSet::empty()
            .with_emoticons([(":(".to_string(), "SAD".to_string())])
            .with_categories([("feel*".to_string(), "affect".to_string())]);
        let all = groups(&[FeatureGroup::Lexical, FeatureGroup::Emotion, FeatureGroup::Liwc]);
        let a = encode(&corpus, &lexicons, &all).unwrap();
        let b = encode(&corpus, &lexicons, &all).unwrap();
        assert_eq!(a.registry(), b.registry());
        for i in 0..a.rows() {
            assert_eq!(a.row(i), b.row(i));
        }
    }

    proptest! {
        // Binary idempotence: repeating a token never changes the row.
        #[test]
        fn duplicated_tokens_do_not_change_rows(words in proptest::collection::vec("[a-z]{1,6}", 1..8)) {
            let text = words.join(" ");
            let doubled = format!("{} {}", text, words[0]);
            let corpus = corpus_of(&[text.as_str()]);
            let corpus_doubled = corpus_of(&[doubled.as_str()]);
            let g = groups(&[FeatureGroup::Lexical]);
            let a = encode(&corpus, &LexiconSet::empty(), &g).unwrap();
            let b = encode(&corpus_doubled, &LexiconSet::empty(), &g).unwrap();
            prop_assert_eq!(a.registry(), b.registry());
            prop_assert_eq!(a.row(0), b.row(0));
        }
    }
}

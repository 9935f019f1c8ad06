//! Lexicon files backing the non-lexical feature groups.
//!
//! All six lexicons are TSV (UTF-8, tab-separated, `#` comment lines).
//! A lexicon file may be absent from the directory; the set records that
//! explicitly and encoding a group whose lexicon is missing is an error.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::featurize::FeatureGroup;
use crate::tokenize::{Token, Tokenizer};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    Strong,
    Weak,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Strong => "strong",
            Strength::Weak => "weak",
        })
    }
}

/// Sentiment lexicon row: polarity with strength, plus subjectivity strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentimentEntry {
    pub polarity: Polarity,
    pub polarity_strength: Strength,
    pub subjectivity_strength: Strength,
}

/// A category pattern, optionally with one trailing `*` wildcard
/// (`feel*` matches any token with prefix `feel`).
#[derive(Debug, Clone)]
struct CategoryPattern {
    prefix: String,
    wildcard: bool,
    category: String,
}

impl CategoryPattern {
    fn matches(&self, token: &str) -> bool {
        if self.wildcard {
            token.starts_with(self.prefix.as_str())
        } else {
            token == self.prefix
        }
    }
}

/// Multi-word cue phrases mapping to an indicator (demographic/personality).
/// Phrases match on consecutive token surfaces after tokenization.
#[derive(Debug, Clone, Default)]
pub struct PhraseLexicon {
    entries: Vec<(Vec<String>, String)>,
}

impl PhraseLexicon {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        let entries = pairs
            .into_iter()
            .map(|(phrase, indicator)| {
                let words = phrase
                    .to_lowercase()
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                (words, indicator)
            })
            .collect();
        PhraseLexicon { entries }
    }

    /// Indicators of every phrase occurring as a consecutive token run.
    pub fn matches<'a>(&'a self, tokens: &[Token]) -> Vec<&'a str> {
        let mut hits = Vec::new();
        for (words, indicator) in &self.entries {
            if words.is_empty() || words.len() > tokens.len() {
                continue;
            }
            let found = tokens.windows(words.len()).any(|window| {
                window
                    .iter()
                    .zip(words)
                    .all(|(token, word)| token.surface == *word)
            });
            if found {
                hits.push(indicator.as_str());
            }
        }
        hits
    }
}

/// The full lexicon inventory. Each member is `None` when its file was
/// absent, which makes the corresponding feature group unavailable.
#[derive(Debug, Clone, Default)]
pub struct LexiconSet {
    emoticons: Option<HashMap<String, String>>,
    sentiment: Option<HashMap<String, SentimentEntry>>,
    categories: Option<Vec<CategoryPattern>>,
    demographic: Option<PhraseLexicon>,
    personality: Option<PhraseLexicon>,
    pos: Option<HashMap<String, String>>,
}

const EMOTICON_FILE: &str = "emoticon.tsv";
const SENTIMENT_FILE: &str = "sentiment.tsv";
const CATEGORIES_FILE: &str = "categories.tsv";
const DEMOGRAPHIC_FILE: &str = "demographic.tsv";
const PERSONALITY_FILE: &str = "personality.tsv";
const POS_FILE: &str = "pos.tsv";

fn read_tsv(path: &Path, columns: usize) -> Result<Vec<(usize, Vec<String>)>, LexiconError> {
    let content = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rows = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if fields.len() != columns || fields.iter().any(String::is_empty) {
            return Err(LexiconError::Malformed {
                path: path.display().to_string(),
                line: lineno + 1,
                message: format!("expected {columns} non-empty tab-separated fields"),
            });
        }
        rows.push((lineno + 1, fields));
    }
    Ok(rows)
}

fn parse_polarity(path: &Path, line: usize, s: &str) -> Result<Polarity, LexiconError> {
    match s {
        "pos" => Ok(Polarity::Positive),
        "neg" => Ok(Polarity::Negative),
        "neutral" => Ok(Polarity::Neutral),
        other => Err(LexiconError::Malformed {
            path: path.display().to_string(),
            line,
            message: format!("polarity must be pos|neg|neutral, got {other:?}"),
        }),
    }
}

fn parse_strength(path: &Path, line: usize, s: &str) -> Result<Strength, LexiconError> {
    match s {
        "strong" => Ok(Strength::Strong),
        "weak" => Ok(Strength::Weak),
        other => Err(LexiconError::Malformed {
            path: path.display().to_string(),
            line,
            message: format!("strength must be strong|weak, got {other:?}"),
        }),
    }
}

impl LexiconSet {
    /// A set with every lexicon absent (only lexical encoding possible).
    pub fn empty() -> Self {
        LexiconSet::default()
    }

    /// Load whichever of the six known lexicon files exist under `dir`.
    /// Missing files are recorded as absent, not errors.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let dir = dir.as_ref();
        let mut set = LexiconSet::empty();

        let emoticon_path = dir.join(EMOTICON_FILE);
        if emoticon_path.exists() {
            let rows = read_tsv(&emoticon_path, 2)?;
            set.emoticons = Some(
                rows.into_iter()
                    .map(|(_, mut r)| (r.remove(0), r.remove(0)))
                    .collect(),
            );
        }

        let sentiment_path = dir.join(SENTIMENT_FILE);
        if sentiment_path.exists() {
            let rows = read_tsv(&sentiment_path, 4)?;
            let mut map = HashMap::new();
            for (lineno, row) in rows {
                let entry = SentimentEntry {
                    polarity: parse_polarity(&sentiment_path, lineno, &row[1])?,
                    polarity_strength: parse_strength(&sentiment_path, lineno, &row[2])?,
                    subjectivity_strength: parse_strength(&sentiment_path, lineno, &row[3])?,
                };
                map.insert(row[0].to_lowercase(), entry);
            }
            set.sentiment = Some(map);
        }

        let categories_path = dir.join(CATEGORIES_FILE);
        if categories_path.exists() {
            let rows = read_tsv(&categories_path, 2)?;
            let mut patterns = Vec::new();
            for (lineno, row) in rows {
                patterns.push(Self::parse_pattern(&categories_path, lineno, &row[0], &row[1])?);
            }
            set.categories = Some(patterns);
        }

        let demographic_path = dir.join(DEMOGRAPHIC_FILE);
        if demographic_path.exists() {
            let rows = read_tsv(&demographic_path, 2)?;
            set.demographic = Some(PhraseLexicon::new(
                rows.into_iter().map(|(_, mut r)| (r.remove(0), r.remove(0))),
            ));
        }

        let personality_path = dir.join(PERSONALITY_FILE);
        if personality_path.exists() {
            let rows = read_tsv(&personality_path, 2)?;
            set.personality = Some(PhraseLexicon::new(
                rows.into_iter().map(|(_, mut r)| (r.remove(0), r.remove(0))),
            ));
        }

        let pos_path = dir.join(POS_FILE);
        if pos_path.exists() {
            let rows = read_tsv(&pos_path, 2)?;
            set.pos = Some(
                rows.into_iter()
                    .map(|(_, mut r)| (r.remove(0).to_lowercase(), r.remove(0)))
                    .collect(),
            );
        }

        Ok(set)
    }

    fn parse_pattern(
        path: &Path,
        line: usize,
        pattern: &str,
        category: &str,
    ) -> Result<CategoryPattern, LexiconError> {
        let stars = pattern.matches('*').count();
        let wildcard = pattern.ends_with('*');
        if stars > 1 || (stars == 1 && !wildcard) || pattern == "*" {
            return Err(LexiconError::Malformed {
                path: path.display().to_string(),
                line,
                message: format!("pattern {pattern:?} may only have one trailing wildcard"),
            });
        }
        let prefix = if wildcard {
            pattern[..pattern.len() - 1].to_lowercase()
        } else {
            pattern.to_lowercase()
        };
        Ok(CategoryPattern {
            prefix,
            wildcard,
            category: category.to_string(),
        })
    }

    // In-memory builders, used by tests and synthetic corpora.

    pub fn with_emoticons(mut self, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        self.emoticons = Some(pairs.into_iter().collect());
        self
    }

    pub fn with_sentiment(
        mut self,
        pairs: impl IntoIterator<Item = (String, SentimentEntry)>,
    ) -> Self {
        self.sentiment = Some(pairs.into_iter().map(|(t, e)| (t.to_lowercase(), e)).collect());
        self
    }

    pub fn with_categories(
        mut self,
        pairs: impl IntoIterator<Item = (String, String)>,
    ) -> Self {
        let patterns = pairs
            .into_iter()
            .map(|(pattern, category)| {
                Self::parse_pattern(Path::new("<memory>"), 0, &pattern, &category)
                    .expect("invalid in-memory category pattern")
            })
            .collect();
        self.categories = Some(patterns);
        self
    }

    pub fn with_demographic(mut self, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        self.demographic = Some(PhraseLexicon::new(pairs));
        self
    }

    pub fn with_personality(mut self, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        self.personality = Some(PhraseLexicon::new(pairs));
        self
    }

    pub fn with_pos(mut self, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        self.pos = Some(
            pairs
                .into_iter()
                .map(|(t, tag)| (t.to_lowercase(), tag))
                .collect(),
        );
        self
    }

    /// Whether the lexicon required by `group` is loaded. Lexical features
    /// need none.
    pub fn supports(&self, group: FeatureGroup) -> bool {
        match group {
            FeatureGroup::Lexical => true,
            FeatureGroup::Syntactic => self.pos.is_some(),
            FeatureGroup::Emotion => self.emoticons.is_some(),
            FeatureGroup::Demographic => self.demographic.is_some(),
            FeatureGroup::Sentiment => self.sentiment.is_some(),
            FeatureGroup::Personality => self.personality.is_some(),
            FeatureGroup::Liwc => self.categories.is_some(),
        }
    }

    /// Tokenizer primed with this set's emoticon surfaces.
    pub fn tokenizer(&self) -> Tokenizer {
        match &self.emoticons {
            Some(map) => Tokenizer::new(map.keys().cloned()),
            None => Tokenizer::plain(),
        }
    }

    pub fn emoticon_category(&self, surface: &str) -> Option<&str> {
        self.emoticons.as_ref()?.get(surface).map(String::as_str)
    }

    pub fn sentiment_entry(&self, token: &str) -> Option<&SentimentEntry> {
        self.sentiment.as_ref()?.get(token)
    }

    pub fn pos_tag(&self, token: &str) -> Option<&str> {
        self.pos.as_ref()?.get(token).map(String::as_str)
    }

    /// All categories whose pattern matches the token.
    pub fn categories_for(&self, token: &str) -> Vec<&str> {
        match &self.categories {
            Some(patterns) => patterns
                .iter()
                .filter(|p| p.matches(token))
                .map(|p| p.category.as_str())
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn demographic_indicators(&self, tokens: &[Token]) -> Vec<&str> {
        match &self.demographic {
            Some(lex) => lex.matches(tokens),
            None => Vec::new(),
        }
    }

    pub fn personality_indicators(&self, tokens: &[Token]) -> Vec<&str> {
        match &self.personality {
            Some(lex) => lex.matches(tokens),
            None => Vec::new(),
        }
    }
}

//! Tokenization with emoticon-aware splitting.
//!
//! Emoticon surfaces from the lexicon are matched greedily (longest first)
//! against the raw text before any punctuation splitting, so `":("` survives
//! as a token. Remaining text is split on whitespace and punctuation, keeping
//! alphanumeric+apostrophe runs intact; `#` and `@` may start a token.
//! Word tokens are lowercased; emoticon tokens keep their lexicon surface.

use std::collections::BTreeSet;

/// One token: its surface form and index within the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub position: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    /// Emoticon surfaces, longest first so greedy matching prefers `":-("`
    /// over `":-"`.
    emoticons: Vec<String>,
}

impl Tokenizer {
    pub fn new(emoticon_surfaces: impl IntoIterator<Item = String>) -> Self {
        let unique: BTreeSet<String> = emoticon_surfaces
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect();
        let mut emoticons: Vec<String> = unique.into_iter().collect();
        emoticons.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Tokenizer { emoticons }
    }

    /// Tokenizer with no emoticon inventory; pure word splitting.
    pub fn plain() -> Self {
        Tokenizer::default()
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens: Vec<Token> = Vec::new();
        let mut word = String::new();
        let bytes_len = text.len();
        let mut push_word = |word: &mut String, tokens: &mut Vec<Token>| {
            let trimmed = word.trim_matches('\'');
            if !trimmed.is_empty() {
                let position = tokens.len();
                tokens.push(Token {
                    surface: trimmed.to_lowercase(),
                    position,
                });
            }
            word.clear();
        };

        let mut i = 0;
        while i < bytes_len {
            if let Some(surface) = self.match_emoticon(&text[i..]) {
                push_word(&mut word, &mut tokens);
                let position = tokens.len();
                tokens.push(Token {
                    surface: surface.to_string(),
                    position,
                });
                i += surface.len();
                continue;
            }
            let ch = text[i..].chars().next().unwrap();
            if ch.is_alphanumeric() || ch == '\'' {
                word.push(ch);
            } else if (ch == '#' || ch == '@') && word.is_empty() {
                word.push(ch);
            } else {
                push_word(&mut word, &mut tokens);
                if ch == '#' || ch == '@' {
                    word.push(ch);
                }
            }
            i += ch.len_utf8();
        }
        push_word(&mut word, &mut tokens);
        tokens
    }

    fn match_emoticon<'a>(&'a self, rest: &str) -> Option<&'a str> {
        self.emoticons
            .iter()
            .find(|surface| rest.starts_with(surface.as_str()))
            .map(String::as_str)
    }
}

//! Bilingual word lexicon.
//!
//! File format: UTF-8 lines `source_word<TAB>target_word[<TAB>weight]`, weight in
//! `(0, 1]` defaulting to 1.0. Blank lines are ignored. Words are NFKC-normalized
//! and lowercased on load; duplicate pairs keep the maximum weight.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use crate::extract::normalize_nfkc;

pub type Translations = BTreeMap<String, f64>;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon read error at line {line}: {source}")]
    Read { line: usize, source: std::io::Error },
    #[error("lexicon line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Word mapping in both directions. `backward` is always the exact inverse of `forward`.
#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    forward: BTreeMap<String, Translations>,
    backward: BTreeMap<String, Translations>,
    // Words containing non-ASCII characters, for longest-match segmentation.
    cjk_words: HashSet<String>,
    max_cjk_chars: usize,
}

/// Lowercased NFKC form used for every lexicon key and lookup.
pub fn normalize_word(w: &str) -> String {
    normalize_nfkc(w.trim()).to_lowercase()
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a lexicon from `(source, target, weight)` triples.
    pub fn from_entries<I, S, T>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, T, f64)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut lex = Lexicon::new();
        for (s, t, w) in entries {
            lex.insert(s.as_ref(), t.as_ref(), w);
        }
        lex
    }

    /// Adds a pair, keeping the larger weight on duplicates. Empty words are ignored.
    pub fn insert(&mut self, src: &str, tgt: &str, weight: f64) {
        let (src, tgt) = (normalize_word(src), normalize_word(tgt));
        if src.is_empty() || tgt.is_empty() {
            return;
        }
        for (map, a, b) in [
            (&mut self.forward, &src, &tgt),
            (&mut self.backward, &tgt, &src),
        ] {
            let slot = map.entry(a.clone()).or_default().entry(b.clone()).or_insert(weight);
            if weight > *slot {
                *slot = weight;
            }
        }
        for w in [src, tgt] {
            if !w.is_ascii() {
                self.max_cjk_chars = self.max_cjk_chars.max(w.chars().count());
                self.cjk_words.insert(w);
            }
        }
    }

    pub fn load<R: BufRead>(source: R) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new();
        for (i, line) in source.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|source| LexiconError::Read { line: lineno, source })?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let format_err = |message: String| LexiconError::Format { line: lineno, message };
            if !(2..=3).contains(&cols.len()) {
                return Err(format_err(format!("expected 2 or 3 columns, found {}", cols.len())));
            }
            let weight = match cols.get(2) {
                None => 1.0,
                Some(w) => w
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format_err(format!("unparsable weight {w:?}")))?,
            };
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(format_err(format!("weight {weight} outside (0, 1]")));
            }
            if normalize_word(cols[0]).is_empty() || normalize_word(cols[1]).is_empty() {
                return Err(format_err("empty word".into()));
            }
            lex.insert(cols[0], cols[1], weight);
        }
        Ok(lex)
    }

    pub fn forward(&self) -> &BTreeMap<String, Translations> {
        &self.forward
    }

    pub fn backward(&self) -> &BTreeMap<String, Translations> {
        &self.backward
    }

    /// Translations of a source word (expects a normalized key).
    pub fn translate(&self, word: &str) -> Option<&Translations> {
        self.forward.get(word)
    }

    pub fn translate_back(&self, word: &str) -> Option<&Translations> {
        self.backward.get(word)
    }

    /// Swaps the two directions.
    pub fn inverted(&self) -> Lexicon {
        Lexicon {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            cjk_words: self.cjk_words.clone(),
            max_cjk_chars: self.max_cjk_chars,
        }
    }

    pub fn contains_cjk_word(&self, word: &str) -> bool {
        self.cjk_words.contains(word)
    }

    /// Longest non-ASCII entry, in characters.
    pub fn max_cjk_word_chars(&self) -> usize {
        self.max_cjk_chars
    }

    /// Number of distinct `(source, target)` pairs.
    pub fn len(&self) -> usize {
        self.forward.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

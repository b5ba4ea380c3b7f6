//! Domain types shared by every pipeline stage.

mod tsv;

pub use tsv::{parse_pairs, serialize_pairs, sanitize_field, CorpusError};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::extract::normalize_nfkc;

/// Short lowercase language identifier such as `en`, `ja` or `other`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LangCode(String);

#[derive(Debug, thiserror::Error)]
#[error("invalid language code {0:?}")]
pub struct InvalidLangCode(pub String);

impl LangCode {
    pub fn en() -> Self {
        LangCode("en".into())
    }

    pub fn ja() -> Self {
        LangCode("ja".into())
    }

    /// Catch-all for anything the detector could not place.
    pub fn other() -> Self {
        LangCode("other".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_en(&self) -> bool {
        self.0 == "en"
    }

    pub fn is_ja(&self) -> bool {
        self.0 == "ja"
    }
}

impl FromStr for LangCode {
    type Err = InvalidLangCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let valid = (2..=8).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_lowercase());
        if valid {
            Ok(LangCode(s.to_owned()))
        } else {
            Err(InvalidLangCode(s.to_owned()))
        }
    }
}

impl TryFrom<String> for LangCode {
    type Error = InvalidLangCode;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<LangCode> for String {
    fn from(l: LangCode) -> String {
        l.0
    }
}

impl fmt::Display for LangCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Balance between two byte counts: `min / max`, or 0 when both are 0.
pub fn balance_ratio(a: u64, b: u64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi == 0 {
        0.0
    } else {
        lo as f64 / hi as f64
    }
}

/// Per-domain text volume by language.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainLangStats {
    pub domain: String,
    pub bytes_by_lang: BTreeMap<LangCode, u64>,
    pub ratio: f64,
}

impl DomainLangStats {
    pub fn new(domain: impl Into<String>) -> Self {
        DomainLangStats {
            domain: domain.into(),
            bytes_by_lang: BTreeMap::new(),
            ratio: 0.0,
        }
    }

    pub fn bytes(&self, lang: &str) -> u64 {
        self.bytes_by_lang
            .iter()
            .find(|(l, _)| l.as_str() == lang)
            .map_or(0, |(_, b)| *b)
    }

    pub fn bytes_en(&self) -> u64 {
        self.bytes("en")
    }

    pub fn bytes_ja(&self) -> u64 {
        self.bytes("ja")
    }

    /// Bytes in every language other than `en` and `ja`.
    pub fn bytes_other(&self) -> u64 {
        self.bytes_by_lang
            .iter()
            .filter(|(l, _)| !l.is_en() && !l.is_ja())
            .map(|(_, b)| *b)
            .sum()
    }

    pub fn add(&mut self, lang: LangCode, bytes: u64) {
        *self.bytes_by_lang.entry(lang).or_insert(0) += bytes;
        self.refresh_ratio();
    }

    pub fn refresh_ratio(&mut self) {
        self.ratio = balance_ratio(self.bytes_en(), self.bytes_ja());
    }
}

/// A fetched page as it came off the wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDocument {
    pub url: String,
    pub domain: String,
    pub fetched_at: DateTime<Utc>,
    pub content_type: String,
    pub body: Vec<u8>,
}

impl RawDocument {
    /// Builds a document, deriving `domain` from the URL host.
    pub fn new(
        url: &str,
        fetched_at: DateTime<Utc>,
        content_type: impl Into<String>,
        body: Vec<u8>,
    ) -> Result<Self, url::ParseError> {
        let parsed = url::Url::parse(url)?;
        let domain = parsed
            .host_str()
            .ok_or(url::ParseError::EmptyHost)?
            .to_ascii_lowercase();
        Ok(RawDocument {
            url: parsed.to_string(),
            domain,
            fetched_at,
            content_type: content_type.into(),
            body,
        })
    }

    pub fn is_html(&self) -> bool {
        is_html_content_type(&self.content_type)
    }
}

pub fn is_html_content_type(ct: &str) -> bool {
    let mime = ct.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    mime == "text/html" || mime == "application/xhtml+xml"
}

/// Extracted, normalized and segmented text of one page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextDocument {
    pub url: String,
    pub lang: LangCode,
    pub sentences: Vec<String>,
    pub char_count: usize,
}

impl TextDocument {
    /// Normalizes every sentence, drops blank ones and recomputes `char_count`.
    pub fn new(url: impl Into<String>, lang: LangCode, sentences: Vec<String>) -> Self {
        let sentences: Vec<String> = sentences
            .into_iter()
            .map(|s| normalize_nfkc(s.trim()).trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect();
        let char_count = sentences.iter().map(|s| s.chars().count()).sum();
        TextDocument {
            url: url.into(),
            lang,
            sentences,
            char_count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Alignment unit shapes: source sentences to target sentences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BeadKind {
    OneOne,
    OneZero,
    ZeroOne,
    TwoOne,
    OneTwo,
    TwoTwo,
}

impl BeadKind {
    pub const ALL: [BeadKind; 6] = [
        BeadKind::OneOne,
        BeadKind::OneZero,
        BeadKind::ZeroOne,
        BeadKind::TwoOne,
        BeadKind::OneTwo,
        BeadKind::TwoTwo,
    ];

    /// `(source sentences, target sentences)` consumed.
    pub fn shape(self) -> (usize, usize) {
        match self {
            BeadKind::OneOne => (1, 1),
            BeadKind::OneZero => (1, 0),
            BeadKind::ZeroOne => (0, 1),
            BeadKind::TwoOne => (2, 1),
            BeadKind::OneTwo => (1, 2),
            BeadKind::TwoTwo => (2, 2),
        }
    }

    pub fn from_shape(src: usize, tgt: usize) -> Option<Self> {
        BeadKind::ALL.into_iter().find(|k| k.shape() == (src, tgt))
    }

    pub fn is_substitution(self) -> bool {
        let (a, b) = self.shape();
        a >= 1 && b >= 1
    }

    /// Same bead seen from the other side.
    pub fn transposed(self) -> Self {
        let (a, b) = self.shape();
        BeadKind::from_shape(b, a).expect("bead kinds are closed under transposition")
    }
}

impl fmt::Display for BeadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.shape();
        write!(f, "{a}:{b}")
    }
}

/// One step of a sentence alignment.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentBead {
    pub kind: BeadKind,
    pub src_span: std::ops::Range<usize>,
    pub tgt_span: std::ops::Range<usize>,
    pub cost: f64,
    /// Lexical overlap of the two spans; 0 for insertions and deletions.
    pub score: f64,
}

/// Aligned sentence pair with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SentencePair {
    pub src_url: String,
    pub tgt_url: String,
    pub src_text: String,
    pub tgt_text: String,
    pub align_score: f64,
    pub filter_score: f64,
}

impl SentencePair {
    /// A pair with no provenance and neutral scores, mostly for seed corpora.
    pub fn bare(src_text: impl Into<String>, tgt_text: impl Into<String>) -> Self {
        SentencePair {
            src_url: String::new(),
            tgt_url: String::new(),
            src_text: src_text.into(),
            tgt_text: tgt_text.into(),
            align_score: 1.0,
            filter_score: 1.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.src_text.is_empty()
            && !self.tgt_text.is_empty()
            && (0.0..=1.0).contains(&self.align_score)
            && (0.0..=1.0).contains(&self.filter_score)
    }
}

/// Logistic filter parameters, self-contained with the feature standardization.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterModel {
    pub feature_names: Vec<String>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl FilterModel {
    /// Identity standardization, zero weights: scores 0.5 everywhere.
    pub fn zeroed(feature_names: Vec<String>) -> Self {
        let n = feature_names.len();
        FilterModel {
            feature_names,
            means: vec![0.0; n],
            scales: vec![1.0; n],
            weights: vec![0.0; n],
            bias: 0.0,
        }
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.feature_names.len();
        self.means.len() == n
            && self.scales.len() == n
            && self.weights.len() == n
            && self.scales.iter().all(|s| s.is_finite() && *s > 0.0)
    }

    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Linear logit on raw (unstandardized) features.
    pub fn logit(&self, x: &[f64]) -> f64 {
        self.standardize(x)
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum::<f64>()
            + self.bias
    }
}

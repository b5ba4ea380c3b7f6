use std::collections::BTreeMap;
use std::fmt;

use crate::corpus::{LangCode, SentencePair};
use crate::langstat::LanguageDetector;
use crate::lexicon::Lexicon;
use crate::sentalign::{lexical_coverage, tokenize};

pub const FEATURE_NAMES: [&str; 10] = [
    "len_src_chars",
    "len_tgt_chars",
    "log_char_ratio",
    "lexical_score_fwd",
    "lexical_score_bwd",
    "langid_conf_src",
    "langid_conf_tgt",
    "digit_jaccard",
    "copy_similarity",
    "punct_ratio_diff",
];

pub const MIN_CHARS: usize = 3;
pub const MAX_CHARS: usize = 2000;
pub const MAX_CHAR_RATIO: f64 = 6.0;
pub const MAX_COPY_SIMILARITY: f64 = 0.9;
pub const MIN_DIGIT_JACCARD: f64 = 0.5;
/// The digit rule only applies once a side has this many digit strings.
pub const DIGIT_RULE_MIN_STRINGS: usize = 3;

const LENGTH_SCALE: f64 = 100.0;
const LENGTH_CAP: f64 = 5.0;

/// Fixed-order feature vector; see [`FEATURE_NAMES`].
#[derive(Clone, Debug, PartialEq)]
pub struct PairFeatures(pub [f64; 10]);

impl PairFeatures {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RejectReason {
    TooShort,
    TooLong,
    CharRatio,
    Copy,
    WrongLanguage,
    DigitMismatch,
}

impl RejectReason {
    pub const ALL: [RejectReason; 6] = [
        RejectReason::TooShort,
        RejectReason::TooLong,
        RejectReason::CharRatio,
        RejectReason::Copy,
        RejectReason::WrongLanguage,
        RejectReason::DigitMismatch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::TooShort => "too_short",
            RejectReason::TooLong => "too_long",
            RejectReason::CharRatio => "char_ratio",
            RejectReason::Copy => "copy",
            RejectReason::WrongLanguage => "wrong_language",
            RejectReason::DigitMismatch => "digit_mismatch",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Maximal runs of ASCII digits, counted as a multiset.
pub fn digit_strings(text: &str) -> BTreeMap<&str, usize> {
    let mut out = BTreeMap::new();
    for run in text.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()) {
        *out.entry(run).or_insert(0) += 1;
    }
    out
}

/// Multiset Jaccard: Σmin / Σmax over counts; 1.0 when both are empty.
pub fn digit_jaccard(src: &str, tgt: &str) -> f64 {
    let (a, b) = (digit_strings(src), digit_strings(tgt));
    let mut inter = 0;
    let mut union = 0;
    for key in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
        let (x, y) = (a.get(key).copied().unwrap_or(0), b.get(key).copied().unwrap_or(0));
        inter += x.min(y);
        union += x.max(y);
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn copy_similarity(src: &str, tgt: &str) -> f64 {
    strsim::normalized_levenshtein(src, tgt)
}

/// Share of characters that are neither alphanumeric nor whitespace.
fn punct_ratio(text: &str) -> f64 {
    let (mut punct, mut total) = (0usize, 0usize);
    for c in text.chars() {
        total += 1;
        if !c.is_alphanumeric() && !c.is_whitespace() {
            punct += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        punct as f64 / total as f64
    }
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// First failing rule, in declaration order of [`RejectReason`].
pub fn hard_rules<D: LanguageDetector + ?Sized>(pair: &SentencePair, langid: &D) -> Result<(), RejectReason> {
    let (ls, lt) = (char_len(&pair.src_text), char_len(&pair.tgt_text));
    if ls < MIN_CHARS || lt < MIN_CHARS {
        return Err(RejectReason::TooShort);
    }
    if ls > MAX_CHARS || lt > MAX_CHARS {
        return Err(RejectReason::TooLong);
    }
    let ratio = lt as f64 / ls as f64;
    if !(1.0 / MAX_CHAR_RATIO..=MAX_CHAR_RATIO).contains(&ratio) {
        return Err(RejectReason::CharRatio);
    }
    if copy_similarity(&pair.src_text, &pair.tgt_text) > MAX_COPY_SIMILARITY {
        return Err(RejectReason::Copy);
    }
    let detected = |text: &str| langid.detect(text).map(|(l, _)| l).ok();
    if detected(&pair.src_text) != Some(LangCode::en()) || detected(&pair.tgt_text) != Some(LangCode::ja()) {
        return Err(RejectReason::WrongLanguage);
    }
    let many_digits = |t: &str| digit_strings(t).values().sum::<usize>() >= DIGIT_RULE_MIN_STRINGS;
    if (many_digits(&pair.src_text) || many_digits(&pair.tgt_text))
        && digit_jaccard(&pair.src_text, &pair.tgt_text) < MIN_DIGIT_JACCARD
    {
        return Err(RejectReason::DigitMismatch);
    }
    Ok(())
}

pub fn extract_features<D: LanguageDetector + ?Sized>(pair: &SentencePair, lexicon: &Lexicon, langid: &D) -> PairFeatures {
    let (src, tgt) = (pair.src_text.as_str(), pair.tgt_text.as_str());
    let (ls, lt) = (char_len(src), char_len(tgt));
    let scaled = |n: usize| (n as f64 / LENGTH_SCALE).min(LENGTH_CAP);
    let src_tokens = tokenize(src, &LangCode::en(), lexicon);
    let tgt_tokens = tokenize(tgt, &LangCode::ja(), lexicon);
    let (fwd, bwd) = lexical_coverage(&src_tokens, &tgt_tokens, lexicon);
    PairFeatures([
        scaled(ls),
        scaled(lt),
        (lt.max(1) as f64 / ls.max(1) as f64).ln(),
        fwd,
        bwd,
        langid.confidence_for(src, &LangCode::en()),
        langid.confidence_for(tgt, &LangCode::ja()),
        digit_jaccard(src, tgt),
        copy_similarity(src, tgt),
        (punct_ratio(src) - punct_ratio(tgt)).abs(),
    ])
}

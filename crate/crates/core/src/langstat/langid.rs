//! Character n-gram naive Bayes language identification.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::corpus::LangCode;
use crate::extract::normalize_nfkc;

pub const DEFAULT_NGRAM_ORDER: usize = 3;
pub const DEFAULT_OTHER_THRESHOLD: f64 = 0.5;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LangIdError {
    #[error("language {0} has no training samples")]
    NoSamples(String),
    #[error("no training samples given")]
    EmptyTrainingSet,
    #[error("training sample {0} is empty")]
    EmptySample(usize),
    #[error("n-gram order must be at least 1")]
    BadOrder,
    #[error("cannot detect the language of empty text")]
    EmptyText,
}

/// Anything that can tag a text with a language and a confidence in `[0, 1]`.
pub trait LanguageDetector: Send + Sync {
    fn detect(&self, text: &str) -> Result<(LangCode, f64), LangIdError>;

    /// Probability that `text` is in `lang`.
    fn confidence_for(&self, text: &str, lang: &LangCode) -> f64;
}

#[derive(Clone, Debug)]
struct LangModel {
    lang: LangCode,
    log_prior: f64,
    log_probs: HashMap<String, f64>,
    // Mass reserved for n-grams never seen in any language.
    log_unseen: f64,
}

#[derive(Clone, Debug)]
pub struct LangIdModel {
    ngram_order: usize,
    langs: Vec<LangModel>,
    other_threshold: f64,
}

/// Text as the model sees it: NFKC, lowercase, whitespace runs collapsed.
fn prepare(text: &str) -> Vec<char> {
    let norm = normalize_nfkc(text).to_lowercase();
    let mut out = Vec::with_capacity(norm.len());
    let mut space = false;
    for c in norm.trim().chars() {
        if c.is_whitespace() {
            space = true;
        } else {
            if space {
                out.push(' ');
            }
            space = false;
            out.push(c);
        }
    }
    out
}

fn for_each_ngram(chars: &[char], n: usize, mut f: impl FnMut(&str)) {
    let mut buf = String::new();
    for w in chars.windows(n) {
        buf.clear();
        buf.extend(w);
        f(&buf);
    }
}

/// Trains on `(language, text)` samples; every language seen gets a model.
pub fn train_langid(samples: &[(LangCode, String)], ngram_order: usize) -> Result<LangIdModel, LangIdError> {
    let declared: BTreeSet<LangCode> = samples.iter().map(|(l, _)| l.clone()).collect();
    train_langid_for(&declared.into_iter().collect::<Vec<_>>(), samples, ngram_order)
}

/// Trains a model over `declared` languages, failing if one of them has no samples.
///
/// Counts use add-one smoothing over the union vocabulary plus one unseen bucket,
/// so each language's distribution sums to one. Priors follow sample counts.
pub fn train_langid_for(
    declared: &[LangCode],
    samples: &[(LangCode, String)],
    ngram_order: usize,
) -> Result<LangIdModel, LangIdError> {
    if ngram_order == 0 {
        return Err(LangIdError::BadOrder);
    }
    if samples.is_empty() || declared.is_empty() {
        return Err(LangIdError::EmptyTrainingSet);
    }
    let mut counts: BTreeMap<&LangCode, (usize, HashMap<String, u64>)> =
        declared.iter().map(|l| (l, (0, HashMap::new()))).collect();
    let mut vocab: BTreeSet<String> = BTreeSet::new();
    for (i, (lang, text)) in samples.iter().enumerate() {
        if text.trim().is_empty() {
            return Err(LangIdError::EmptySample(i));
        }
        let Some((n_samples, grams)) = counts.get_mut(lang) else {
            continue;
        };
        *n_samples += 1;
        for_each_ngram(&prepare(text), ngram_order, |g| {
            *grams.entry(g.to_owned()).or_insert(0) += 1;
            if !vocab.contains(g) {
                vocab.insert(g.to_owned());
            }
        });
    }
    if let Some((lang, _)) = counts.iter().find(|(_, (n, _))| *n == 0) {
        return Err(LangIdError::NoSamples(lang.to_string()));
    }
    let total_samples: usize = counts.values().map(|(n, _)| n).sum();
    let buckets = vocab.len() as f64 + 1.0;
    let langs = counts
        .into_iter()
        .map(|(lang, (n, grams))| {
            let total: u64 = grams.values().sum();
            let denom = (total as f64 + buckets).ln();
            LangModel {
                lang: lang.clone(),
                log_prior: (n as f64 / total_samples as f64).ln(),
                log_probs: grams
                    .into_iter()
                    .map(|(g, c)| (g, (c as f64 + 1.0).ln() - denom))
                    .collect(),
                log_unseen: -denom,
            }
        })
        .collect();
    Ok(LangIdModel {
        ngram_order,
        langs,
        other_threshold: DEFAULT_OTHER_THRESHOLD,
    })
}

impl LangIdModel {
    pub fn ngram_order(&self) -> usize {
        self.ngram_order
    }

    pub fn languages(&self) -> impl Iterator<Item = &LangCode> {
        self.langs.iter().map(|m| &m.lang)
    }

    pub fn with_other_threshold(mut self, threshold: f64) -> Self {
        self.other_threshold = threshold;
        self
    }

    /// Log probability of an n-gram under `lang`, for inspection.
    pub fn log_prob(&self, lang: &LangCode, ngram: &str) -> Option<f64> {
        let m = self.langs.iter().find(|m| &m.lang == lang)?;
        Some(m.log_probs.get(ngram).copied().unwrap_or(m.log_unseen))
    }

    pub fn log_prior(&self, lang: &LangCode) -> Option<f64> {
        self.langs.iter().find(|m| &m.lang == lang).map(|m| m.log_prior)
    }

    /// Unnormalized joint log scores, one per language in model order.
    pub fn log_scores(&self, text: &str) -> Vec<(LangCode, f64)> {
        let chars = prepare(text);
        self.langs
            .iter()
            .map(|m| {
                let mut score = m.log_prior;
                if chars.len() >= self.ngram_order {
                    for_each_ngram(&chars, self.ngram_order, |g| {
                        score += m.log_probs.get(g).copied().unwrap_or(m.log_unseen);
                    });
                }
                (m.lang.clone(), score)
            })
            .collect()
    }

    /// Normalized posterior over all languages.
    pub fn posteriors(&self, text: &str) -> Vec<(LangCode, f64)> {
        let scores = self.log_scores(text);
        let max = scores.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = scores.iter().map(|(_, s)| (s - max).exp()).sum();
        scores
            .into_iter()
            .map(|(l, s)| (l, (s - max).exp() / z))
            .collect()
    }

    /// Most probable language and its posterior; `other` below the threshold.
    pub fn detect_language(&self, text: &str) -> Result<(LangCode, f64), LangIdError> {
        if text.trim().is_empty() {
            return Err(LangIdError::EmptyText);
        }
        let mut best: Option<(LangCode, f64)> = None;
        for (l, p) in self.posteriors(text) {
            if best.as_ref().is_none_or(|(_, bp)| p > *bp) {
                best = Some((l, p));
            }
        }
        let (lang, conf) = best.expect("model has at least one language");
        if conf < self.other_threshold {
            Ok((LangCode::other(), conf))
        } else {
            Ok((lang, conf))
        }
    }
}

impl LanguageDetector for LangIdModel {
    fn detect(&self, text: &str) -> Result<(LangCode, f64), LangIdError> {
        self.detect_language(text)
    }

    fn confidence_for(&self, text: &str, lang: &LangCode) -> f64 {
        if text.trim().is_empty() {
            return 0.0;
        }
        self.posteriors(text)
            .into_iter()
            .find(|(l, _)| l == lang)
            .map_or(0.0, |(_, p)| p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_sample_model() -> LangIdModel {
        train_langid(
            &[(LangCode::en(), "the cat".into()), (LangCode::ja(), "猫がいる".into())],
            3,
        )
        .unwrap()
    }

    #[test]
    fn hand_computed_two_sample_scores() {
        // en trigrams: the, "he ", "e c", " ca", cat (5); ja: 猫がい, がいる (2).
        // Union vocabulary 7, plus one unseen bucket: 8.
        // "the dog": the, "he " seen in en; "e d", " do", dog unseen everywhere.
        let m = two_sample_model();
        let en = 0.5f64.ln() + 2.0 * (2.0f64 / 13.0).ln() + 3.0 * (1.0f64 / 13.0).ln();
        let ja = 0.5f64.ln() + 5.0 * (1.0f64 / 10.0).ln();
        let scores = m.log_scores("the dog");
        assert!((scores[0].1 - en).abs() < 1e-12);
        assert!((scores[1].1 - ja).abs() < 1e-12);
        let (lang, conf) = m.detect_language("the dog").unwrap();
        assert_eq!(lang, LangCode::en());
        let expected = 1.0 / (1.0 + (ja - en).exp());
        assert!((conf - expected).abs() < 1e-12);
    }

    #[test]
    fn self_classification() {
        let m = two_sample_model();
        assert_eq!(m.detect_language("the cat").unwrap().0, LangCode::en());
        assert_eq!(m.detect_language("猫がいる").unwrap().0, LangCode::ja());
    }

    #[test]
    fn single_language_always_wins() {
        let m = train_langid(&[(LangCode::en(), "hello there".into())], 3).unwrap();
        for t in ["犬", "zzzz", "hello"] {
            assert_eq!(m.detect_language(t).unwrap(), (LangCode::en(), 1.0));
        }
    }

    #[test]
    fn errors() {
        assert_eq!(train_langid(&[], 3).unwrap_err(), LangIdError::EmptyTrainingSet);
        assert_eq!(
            train_langid_for(&[LangCode::en(), LangCode::ja()], &[(LangCode::en(), "x".into())], 3).unwrap_err(),
            LangIdError::NoSamples("ja".into())
        );
        assert_eq!(train_langid(&[(LangCode::en(), " ".into())], 3).unwrap_err(), LangIdError::EmptySample(0));
        assert_eq!(two_sample_model().detect_language("  ").unwrap_err(), LangIdError::EmptyText);
    }

    #[test]
    fn short_text_uses_priors() {
        let m = train_langid(
            &[
                (LangCode::en(), "aaa".into()),
                (LangCode::en(), "bbb".into()),
                (LangCode::en(), "ccc".into()),
                (LangCode::ja(), "あああ".into()),
            ],
            3,
        )
        .unwrap();
        let (lang, conf) = m.detect_language("あ").unwrap();
        assert_eq!(lang, LangCode::en());
        assert!((conf - 0.75).abs() < 1e-12);
    }

    #[test]
    fn other_below_threshold() {
        let m = two_sample_model().with_other_threshold(0.99);
        assert_eq!(m.detect_language("xyz").unwrap().0, LangCode::other());
    }

    #[test]
    fn distributions_are_normalized() {
        let m = two_sample_model();
        for lang in [LangCode::en(), LangCode::ja()] {
            let lm = m.langs.iter().find(|l| l.lang == lang).unwrap();
            let vocab_size = 7.0;
            let seen: f64 = lm.log_probs.values().map(|p| p.exp()).sum();
            let unseen_types = vocab_size + 1.0 - lm.log_probs.len() as f64;
            assert!((seen + unseen_types * lm.log_unseen.exp() - 1.0).abs() < 1e-12);
        }
    }
}

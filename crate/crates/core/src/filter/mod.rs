//! Hard rules plus a logistic-regression classifier over pair features.

mod features;
mod model_io;
mod train;

pub use features::{
    copy_similarity, digit_jaccard, digit_strings, extract_features, hard_rules, PairFeatures, RejectReason,
    DIGIT_RULE_MIN_STRINGS, FEATURE_NAMES, MAX_CHARS, MAX_CHAR_RATIO, MAX_COPY_SIMILARITY, MIN_CHARS,
    MIN_DIGIT_JACCARD,
};
pub use model_io::{read_model, write_model, ModelFileError, MODEL_FORMAT};
pub use train::{
    fit_logistic, loss_and_gradient, standardization, synthesize_negatives, train_filter, NegativeRecipe,
    TrainConfig, TrainedFilter, MIN_POSITIVES,
};

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::corpus::{FilterModel, SentencePair};
use crate::langstat::LanguageDetector;
use crate::lexicon::Lexicon;

pub const DEFAULT_FILTER_THRESHOLD: f64 = 0.5;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FilterError {
    #[error("need at least {need} positive pairs to train, got {got}")]
    TooFewPositives { got: usize, need: usize },
    #[error("model expects {expected} features, got {got}")]
    FeatureLength { expected: usize, got: usize },
    #[error("model parameters are inconsistent")]
    InconsistentModel,
}

/// `sigmoid(w · standardized(x) + b)`, kept strictly inside (0, 1).
pub fn score_pair(model: &FilterModel, features: &[f64]) -> Result<f64, FilterError> {
    if !model.is_consistent() {
        return Err(FilterError::InconsistentModel);
    }
    if features.len() != model.weights.len() {
        return Err(FilterError::FeatureLength { expected: model.weights.len(), got: features.len() });
    }
    let z = model.logit(features);
    let p = if z >= 0.0 { 1.0 / (1.0 + (-z).exp()) } else { z.exp() / (1.0 + z.exp()) };
    Ok(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
}

/// Counts per hard-rule reason and below-threshold drops.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RejectReport {
    pub by_reason: BTreeMap<RejectReason, u64>,
    pub below_threshold: u64,
    pub kept: u64,
}

impl RejectReport {
    pub fn rejected(&self) -> u64 {
        self.by_reason.values().sum::<u64>() + self.below_threshold
    }

    /// TSV `reason\tcount`, every reason listed, then `below_threshold`.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        for reason in RejectReason::ALL {
            writeln!(sink, "{}\t{}", reason, self.by_reason.get(&reason).copied().unwrap_or(0))?;
        }
        writeln!(sink, "below_threshold\t{}", self.below_threshold)
    }
}

enum Verdict {
    Rejected(RejectReason),
    Scored(f64),
}

/// Scores every pair and applies `threshold` (kept iff score ≥ threshold).
/// Output order follows input order.
pub fn filter_corpus<D: LanguageDetector + ?Sized>(
    pairs: &[SentencePair],
    model: &FilterModel,
    lexicon: &Lexicon,
    langid: &D,
    threshold: f64,
) -> Result<(Vec<SentencePair>, RejectReport), FilterError> {
    let verdicts: Vec<Verdict> = pairs
        .par_iter()
        .map(|p| match hard_rules(p, langid) {
            Err(reason) => Ok(Verdict::Rejected(reason)),
            Ok(()) => score_pair(model, extract_features(p, lexicon, langid).as_slice()).map(Verdict::Scored),
        })
        .collect::<Result<_, _>>()?;
    let mut report = RejectReport::default();
    let mut kept = Vec::new();
    for (pair, verdict) in pairs.iter().zip(verdicts) {
        match verdict {
            Verdict::Rejected(reason) => *report.by_reason.entry(reason).or_insert(0) += 1,
            Verdict::Scored(score) if score >= threshold => {
                let mut p = pair.clone();
                p.filter_score = score;
                kept.push(p);
            }
            Verdict::Scored(_) => report.below_threshold += 1,
        }
    }
    report.kept = kept.len() as u64;
    Ok((kept, report))
}

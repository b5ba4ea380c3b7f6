use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{FilterModel, LangCode, SentencePair};
use crate::langstat::LanguageDetector;
use crate::lexicon::Lexicon;
use crate::sentalign::tokenize;

use super::features::{extract_features, FEATURE_NAMES};
use super::FilterError;

pub const MIN_POSITIVES: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { seed: 0, epochs: 200, learning_rate: 0.1, l2: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativeRecipe {
    Repair,
    Truncate,
    Shuffle,
    Copy,
}

impl NegativeRecipe {
    pub const ALL: [NegativeRecipe; 4] =
        [NegativeRecipe::Repair, NegativeRecipe::Truncate, NegativeRecipe::Shuffle, NegativeRecipe::Copy];
}

#[derive(Clone, Debug)]
pub struct TrainedFilter {
    pub model: FilterModel,
    /// Objective value before each epoch, plus the final value.
    pub loss_history: Vec<f64>,
}

/// One synthetic negative per positive, the recipe drawn uniformly per sample.
pub fn synthesize_negatives(positives: &[SentencePair], seed: u64, lexicon: &Lexicon) -> Vec<(NegativeRecipe, SentencePair)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = positives.len();
    positives
        .iter()
        .enumerate()
        .map(|(k, pos)| {
            let recipe = NegativeRecipe::ALL[rng.random_range(0..NegativeRecipe::ALL.len())];
            let tgt = match recipe {
                NegativeRecipe::Repair if n > 1 => {
                    let offset = rng.random_range(1..n);
                    positives[(k + offset) % n].tgt_text.clone()
                }
                NegativeRecipe::Repair => String::new(),
                NegativeRecipe::Truncate => {
                    let chars: Vec<char> = pos.tgt_text.chars().collect();
                    chars[..chars.len().div_ceil(2)].iter().collect()
                }
                NegativeRecipe::Shuffle => {
                    let mut tokens = tokenize(&pos.tgt_text, &LangCode::ja(), lexicon);
                    tokens.shuffle(&mut rng);
                    tokens.concat()
                }
                NegativeRecipe::Copy => pos.src_text.clone(),
            };
            let mut neg = pos.clone();
            neg.tgt_text = tgt;
            (recipe, neg)
        })
        .collect()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Objective `mean log loss + (l2 / 2)·|w|²` (bias unregularized) and its
/// gradient `(d/dw, d/db)` on already standardized rows.
pub fn loss_and_gradient(xs: &[Vec<f64>], ys: &[f64], weights: &[f64], bias: f64, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z = x.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>() + bias;
        // -y ln σ(z) - (1-y) ln(1-σ(z)) = softplus(z) - y z
        loss += softplus(z) - y * z;
        let r = sigmoid(z) - y;
        for (g, v) in grad_w.iter_mut().zip(x) {
            *g += r * v;
        }
        grad_b += r;
    }
    let reg: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (loss / n + reg, grad_w, grad_b / n)
}

/// Column means and population standard deviations (1.0 for constant columns).
pub fn standardization(xs: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = xs.first().map_or(0, Vec::len);
    let n = xs.len().max(1) as f64;
    let means: Vec<f64> = (0..d).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / n).collect();
    let scales = (0..d)
        .map(|j| {
            let var = xs.iter().map(|x| (x[j] - means[j]).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (means, scales)
}

/// Logistic regression by full-batch gradient descent on raw feature rows.
pub fn fit_logistic(names: Vec<String>, xs: &[Vec<f64>], ys: &[f64], config: &TrainConfig) -> TrainedFilter {
    let (means, scales) = standardization(xs);
    let mut model = FilterModel { feature_names: names, means, scales, weights: vec![0.0; xs.first().map_or(0, Vec::len)], bias: 0.0 };
    let std_xs: Vec<Vec<f64>> = xs.iter().map(|x| model.standardize(x)).collect();
    let mut loss_history = Vec::with_capacity(config.epochs + 1);
    for _ in 0..config.epochs {
        let (loss, gw, gb) = loss_and_gradient(&std_xs, ys, &model.weights, model.bias, config.l2);
        loss_history.push(loss);
        for (w, g) in model.weights.iter_mut().zip(&gw) {
            *w -= config.learning_rate * g;
        }
        model.bias -= config.learning_rate * gb;
    }
    loss_history.push(loss_and_gradient(&std_xs, ys, &model.weights, model.bias, config.l2).0);
    TrainedFilter { model, loss_history }
}

/// Trains the pair classifier on `positives` and as many synthesized negatives.
pub fn train_filter<D: LanguageDetector + ?Sized>(
    positives: &[SentencePair],
    lexicon: &Lexicon,
    langid: &D,
    config: &TrainConfig,
) -> Result<TrainedFilter, FilterError> {
    if positives.len() < MIN_POSITIVES {
        return Err(FilterError::TooFewPositives { got: positives.len(), need: MIN_POSITIVES });
    }
    let negatives = synthesize_negatives(positives, config.seed, lexicon);
    let rows: Vec<&SentencePair> = positives.iter().chain(negatives.iter().map(|(_, p)| p)).collect();
    let xs: Vec<Vec<f64>> = rows.par_iter().map(|p| extract_features(p, lexicon, langid).0.to_vec()).collect();
    let ys: Vec<f64> = (0..rows.len()).map(|i| if i < positives.len() { 1.0 } else { 0.0 }).collect();
    let names = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    Ok(fit_logistic(names, &xs, &ys, config))
}

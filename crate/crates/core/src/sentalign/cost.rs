use std::collections::{BTreeMap, HashSet};

use crate::corpus::BeadKind;
use crate::lexicon::Lexicon;

use super::tokenize::is_digit_string;
use super::AlignError;

/// Length costs are clamped to this value.
pub const MAX_LENGTH_COST: f64 = 25.0;

#[derive(Clone, Debug, PartialEq)]
pub struct AlignParams {
    /// Unnormalized bead priors; missing or zero kinds are disabled.
    pub bead_priors: BTreeMap<BeadKind, f64>,
    /// Expected target characters per source character; `None` estimates it per document pair.
    pub length_ratio: Option<f64>,
    /// Clamp range for the estimated ratio.
    pub ratio_bounds: (f64, f64),
    pub length_var: f64,
    pub lex_weight: f64,
    pub skip_penalty: f64,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams {
            bead_priors: BTreeMap::from([
                (BeadKind::OneOne, 0.89),
                (BeadKind::OneZero, 0.00495),
                (BeadKind::ZeroOne, 0.00495),
                (BeadKind::TwoOne, 0.0445),
                (BeadKind::OneTwo, 0.0445),
                (BeadKind::TwoTwo, 0.011),
            ]),
            length_ratio: None,
            ratio_bounds: (0.3, 3.0),
            length_var: 6.8,
            lex_weight: 3.0,
            skip_penalty: 2.0,
        }
    }
}

impl AlignParams {
    pub fn validate(&self) -> Result<(), AlignError> {
        let bad = |m: &str| Err(AlignError::InvalidParams(m.to_owned()));
        if self.bead_priors.values().any(|p| !p.is_finite() || *p < 0.0) {
            return bad("bead priors must be finite and non-negative");
        }
        for kind in [BeadKind::OneZero, BeadKind::ZeroOne] {
            if self.bead_priors.get(&kind).copied().unwrap_or(0.0) <= 0.0 {
                return bad("1:0 and 0:1 beads must stay enabled");
            }
        }
        if !(self.length_var > 0.0) {
            return bad("length variance must be positive");
        }
        if !(self.lex_weight >= 0.0) || !(self.skip_penalty >= 0.0) {
            return bad("lexical weight and skip penalty must be non-negative");
        }
        if let Some(c) = self.length_ratio {
            if !(c > 0.0 && c.is_finite()) {
                return bad("length ratio must be positive");
            }
        }
        let (lo, hi) = self.ratio_bounds;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad("ratio bounds must satisfy 0 < lo <= hi");
        }
        Ok(())
    }

    /// `-ln(prior)` per enabled kind, with priors renormalized to sum to one.
    pub fn neg_log_priors(&self) -> Vec<(BeadKind, f64)> {
        let total: f64 = self.bead_priors.values().sum();
        BeadKind::ALL
            .into_iter()
            .filter_map(|k| {
                let p = self.bead_priors.get(&k).copied().unwrap_or(0.0);
                (p > 0.0).then(|| (k, -(p / total).ln()))
            })
            .collect()
    }

    pub fn ratio_or_default(&self) -> f64 {
        self.length_ratio.unwrap_or(1.0)
    }

    /// `total_tgt / total_src` clamped to `ratio_bounds`; 1.0 (clamped) without source text.
    pub fn estimate_ratio(&self, src_chars: usize, tgt_chars: usize) -> f64 {
        let (lo, hi) = self.ratio_bounds;
        let raw = if src_chars == 0 { 1.0 } else { tgt_chars as f64 / src_chars as f64 };
        raw.clamp(lo, hi)
    }
}

/// `ln(erfc(x))` for `x >= 0`, from a Chebyshev-fitted rational approximation
/// (fractional error below 1.2e-7). Computed in log space so it never underflows.
pub fn ln_erfc(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let t = 1.0 / (1.0 + 0.5 * x);
    let poly = -1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98 + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    t.ln() - x * x + poly
}

/// Length mismatch cost: `-ln(2 (1 - Phi(|delta|)))` with
/// `delta = (tgt - src * c) / sqrt(max(src, 1) * s2)`, clamped to `[0, 25]`.
pub fn length_cost(src_chars: usize, tgt_chars: usize, params: &AlignParams) -> Result<f64, AlignError> {
    if src_chars == 0 && tgt_chars == 0 {
        return Err(AlignError::EmptyLengths);
    }
    Ok(length_cost_with(src_chars, tgt_chars, params.ratio_or_default(), params.length_var))
}

pub(crate) fn length_cost_with(src_chars: usize, tgt_chars: usize, ratio: f64, var: f64) -> f64 {
    let src = src_chars as f64;
    let delta = (tgt_chars as f64 - src * ratio) / (src.max(1.0) * var).sqrt();
    if delta == 0.0 {
        return 0.0;
    }
    // 2 (1 - Phi(d)) = erfc(d / sqrt 2)
    let cost = -ln_erfc(delta.abs() / std::f64::consts::SQRT_2);
    cost.clamp(0.0, MAX_LENGTH_COST)
}

/// Fractions of source and target tokens whose translation (or identical
/// digit string) occurs on the other side.
pub fn lexical_coverage(src_tokens: &[String], tgt_tokens: &[String], lexicon: &Lexicon) -> (f64, f64) {
    if src_tokens.is_empty() || tgt_tokens.is_empty() {
        return (0.0, 0.0);
    }
    let src_set: HashSet<&str> = src_tokens.iter().map(String::as_str).collect();
    let tgt_set: HashSet<&str> = tgt_tokens.iter().map(String::as_str).collect();
    let covered = |tokens: &[String], other: &HashSet<&str>, backward: bool| {
        let n = tokens
            .iter()
            .filter(|tok| {
                if is_digit_string(tok) && other.contains(tok.as_str()) {
                    return true;
                }
                let translations = if backward { lexicon.translate_back(tok) } else { lexicon.translate(tok) };
                translations.is_some_and(|ts| ts.keys().any(|t| other.contains(t.as_str())))
            })
            .count();
        n as f64 / tokens.len() as f64
    };
    (covered(src_tokens, &tgt_set, false), covered(tgt_tokens, &src_set, true))
}

/// Harmonic mean of the two coverages (0 when either is 0).
pub fn lexical_score(src_tokens: &[String], tgt_tokens: &[String], lexicon: &Lexicon) -> f64 {
    let (s, t) = lexical_coverage(src_tokens, tgt_tokens, lexicon);
    if s == 0.0 || t == 0.0 {
        0.0
    } else {
        2.0 * s * t / (s + t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn perfect_length_match_costs_nothing() {
        let p = AlignParams { length_ratio: Some(1.0), ..AlignParams::default() };
        assert_eq!(length_cost(10, 10, &p).unwrap(), 0.0);
        let p2 = AlignParams { length_ratio: Some(0.5), ..AlignParams::default() };
        assert_eq!(length_cost(40, 20, &p2).unwrap(), 0.0);
        assert!(matches!(length_cost(0, 0, &p), Err(AlignError::EmptyLengths)));
    }

    #[test]
    fn length_cost_is_clamped() {
        let p = AlignParams { length_ratio: Some(1.0), ..AlignParams::default() };
        assert_eq!(length_cost(1, 5000, &p).unwrap(), MAX_LENGTH_COST);
        assert!(length_cost(0, 3, &p).unwrap() > 0.0);
    }

    #[test]
    fn ln_erfc_near_zero() {
        assert!(ln_erfc(0.0).abs() < 2e-7);
    }

    #[test]
    fn coverage_example() {
        let lex = Lexicon::from_entries([("dog", "犬", 1.0), ("runs", "走る", 1.0)]);
        let src = toks(&["dog", "runs"]);
        let tgt = toks(&["犬", "が", "走る"]);
        let (s, t) = lexical_coverage(&src, &tgt, &lex);
        assert_eq!(s, 1.0);
        assert!((t - 2.0 / 3.0).abs() < 1e-15);
        assert!((lexical_score(&src, &tgt, &lex) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn lexical_edge_cases() {
        let lex = Lexicon::from_entries([("dog", "犬", 1.0)]);
        assert_eq!(lexical_score(&toks(&["dog"]), &toks(&["犬"]), &lex), 1.0);
        assert_eq!(lexical_score(&toks(&["cat"]), &toks(&["猫"]), &Lexicon::new()), 0.0);
        assert_eq!(lexical_score(&toks(&["in", "2020"]), &toks(&["2020", "年"]), &Lexicon::new()), 0.5);
        assert_eq!(lexical_score(&[], &toks(&["犬"]), &lex), 0.0);
    }

    #[test]
    fn priors_renormalized() {
        let p = AlignParams::default();
        let total: f64 = p.neg_log_priors().iter().map(|(_, nl)| (-nl).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut no22 = AlignParams::default();
        no22.bead_priors.remove(&BeadKind::TwoTwo);
        assert_eq!(no22.neg_log_priors().len(), 5);
    }

    #[test]
    fn ratio_estimation() {
        let p = AlignParams::default();
        assert_eq!(p.estimate_ratio(100, 50), 0.5);
        assert_eq!(p.estimate_ratio(100, 10), 0.3);
        assert_eq!(p.estimate_ratio(10, 100), 3.0);
        assert_eq!(p.estimate_ratio(0, 100), 1.0);
    }

    #[test]
    fn invalid_params() {
        let p = AlignParams { length_var: 0.0, ..AlignParams::default() };
        assert!(p.validate().is_err());
        let p = AlignParams { lex_weight: -1.0, ..AlignParams::default() };
        assert!(p.validate().is_err());
        assert!(AlignParams::default().validate().is_ok());
    }
}

//! Sentence alignment within a document pair: dynamic programming over beads
//! scored by sentence length and bilingual-lexicon overlap.

mod cost;
mod tokenize;

pub use cost::{length_cost, lexical_coverage, lexical_score, ln_erfc, AlignParams, MAX_LENGTH_COST};
pub use tokenize::{is_digit_string, tokenize};

use crate::corpus::{AlignmentBead, BeadKind, LangCode, SentencePair, TextDocument};
use crate::lexicon::Lexicon;

pub const DEFAULT_MIN_ALIGN_SCORE: f64 = 0.1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AlignError {
    #[error("length cost undefined when both sides are empty")]
    EmptyLengths,
    #[error("invalid alignment parameters: {0}")]
    InvalidParams(String),
}

/// Precomputed per-sentence data and the cost of any bead placed at any position.
pub struct BeadScorer<'a> {
    lexicon: &'a Lexicon,
    src_tokens: Vec<Vec<String>>,
    tgt_tokens: Vec<Vec<String>>,
    src_chars: Vec<usize>,
    tgt_chars: Vec<usize>,
    neg_log_priors: Vec<(BeadKind, f64)>,
    ratio: f64,
    var: f64,
    lex_weight: f64,
    skip_penalty: f64,
}

impl<'a> BeadScorer<'a> {
    pub fn new<S: AsRef<str>>(
        src: &[S],
        src_lang: &LangCode,
        tgt: &[S],
        tgt_lang: &LangCode,
        lexicon: &'a Lexicon,
        params: &AlignParams,
    ) -> Self {
        let chars = |v: &[S]| v.iter().map(|s| s.as_ref().chars().count()).collect::<Vec<_>>();
        let (src_chars, tgt_chars) = (chars(src), chars(tgt));
        let ratio = params.length_ratio.unwrap_or_else(|| {
            params.estimate_ratio(src_chars.iter().sum(), tgt_chars.iter().sum())
        });
        BeadScorer {
            lexicon,
            src_tokens: src.iter().map(|s| tokenize(s.as_ref(), src_lang, lexicon)).collect(),
            tgt_tokens: tgt.iter().map(|s| tokenize(s.as_ref(), tgt_lang, lexicon)).collect(),
            src_chars,
            tgt_chars,
            neg_log_priors: params.neg_log_priors(),
            ratio,
            var: params.length_var,
            lex_weight: params.lex_weight,
            skip_penalty: params.skip_penalty,
        }
    }

    pub fn src_len(&self) -> usize {
        self.src_chars.len()
    }

    pub fn tgt_len(&self) -> usize {
        self.tgt_chars.len()
    }

    /// Length ratio in effect (given or estimated).
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Enabled kinds with their `-ln prior`, in a fixed order.
    pub fn kinds(&self) -> &[(BeadKind, f64)] {
        &self.neg_log_priors
    }

    /// `(cost, lexical score)` of a bead starting at source `i`, target `j`.
    pub fn bead_cost(&self, kind: BeadKind, neg_log_prior: f64, i: usize, j: usize) -> (f64, f64) {
        let (a, b) = kind.shape();
        if a == 0 || b == 0 {
            return (neg_log_prior + self.skip_penalty, 0.0);
        }
        let src_chars: usize = self.src_chars[i..i + a].iter().sum();
        let tgt_chars: usize = self.tgt_chars[j..j + b].iter().sum();
        let length = if src_chars == 0 && tgt_chars == 0 {
            0.0
        } else {
            cost::length_cost_with(src_chars, tgt_chars, self.ratio, self.var)
        };
        let lex = if a == 1 && b == 1 {
            lexical_score(&self.src_tokens[i], &self.tgt_tokens[j], self.lexicon)
        } else {
            let s: Vec<String> = self.src_tokens[i..i + a].concat();
            let t: Vec<String> = self.tgt_tokens[j..j + b].concat();
            lexical_score(&s, &t, self.lexicon)
        };
        (neg_log_prior + length + self.lex_weight * (1.0 - lex), lex)
    }
}

/// Minimum-cost monotone bead segmentation over a prepared scorer.
pub fn align_with_scorer(scorer: &BeadScorer<'_>) -> Vec<AlignmentBead> {
    let (n, m) = (scorer.src_len(), scorer.tgt_len());
    let width = m + 1;
    let mut table = vec![f64::INFINITY; (n + 1) * width];
    let mut back: Vec<Option<(BeadKind, f64, f64)>> = vec![None; (n + 1) * width];
    table[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut choice = None;
            for &(kind, nlp) in scorer.kinds() {
                let (a, b) = kind.shape();
                if i < a || j < b {
                    continue;
                }
                let prev = table[(i - a) * width + (j - b)];
                if !prev.is_finite() {
                    continue;
                }
                let (c, lex) = scorer.bead_cost(kind, nlp, i - a, j - b);
                let total = prev + c;
                if total < best {
                    best = total;
                    choice = Some((kind, c, lex));
                }
            }
            table[i * width + j] = best;
            back[i * width + j] = choice;
        }
    }
    let mut beads = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let (kind, cost, score) = back[i * width + j].expect("skip beads make every cell reachable");
        let (a, b) = kind.shape();
        beads.push(AlignmentBead {
            kind,
            src_span: i - a..i,
            tgt_span: j - b..j,
            cost,
            score,
        });
        i -= a;
        j -= b;
    }
    beads.reverse();
    beads
}

/// Aligns sentences in `src_lang` with sentences in `tgt_lang`.
pub fn align_sentences_langs<S: AsRef<str>>(
    src: &[S],
    src_lang: &LangCode,
    tgt: &[S],
    tgt_lang: &LangCode,
    lexicon: &Lexicon,
    params: &AlignParams,
) -> Result<Vec<AlignmentBead>, AlignError> {
    params.validate()?;
    let scorer = BeadScorer::new(src, src_lang, tgt, tgt_lang, lexicon, params);
    Ok(align_with_scorer(&scorer))
}

/// Aligns English `src` sentences with Japanese `tgt` sentences.
pub fn align_sentences<S: AsRef<str>>(
    src: &[S],
    tgt: &[S],
    lexicon: &Lexicon,
    params: &AlignParams,
) -> Result<Vec<AlignmentBead>, AlignError> {
    align_sentences_langs(src, &LangCode::en(), tgt, &LangCode::ja(), lexicon, params)
}

/// Sum of bead costs, in bead order.
pub fn total_cost(beads: &[AlignmentBead]) -> f64 {
    beads.iter().fold(0.0, |acc, b| acc + b.cost)
}

/// Turns substitution beads into sentence pairs, dropping those below `min_align_score`.
pub fn extract_pairs(
    beads: &[AlignmentBead],
    src_doc: &TextDocument,
    tgt_doc: &TextDocument,
    min_align_score: f64,
) -> Vec<SentencePair> {
    beads
        .iter()
        .filter(|b| b.kind.is_substitution() && b.score >= min_align_score)
        .map(|b| SentencePair {
            src_url: src_doc.url.clone(),
            tgt_url: tgt_doc.url.clone(),
            src_text: src_doc.sentences[b.src_span.clone()].join(" "),
            tgt_text: tgt_doc.sentences[b.tgt_span.clone()].join(" "),
            align_score: b.score.clamp(0.0, 1.0),
            filter_score: 1.0,
        })
        .collect()
}

//! Pairing English and Japanese documents of one domain by URL and content similarity.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use url::Url;

use crate::corpus::TextDocument;
use crate::lexicon::Lexicon;
use crate::sentalign::{is_digit_string, tokenize};

pub const DEFAULT_MIN_DOC_SCORE: f64 = 0.3;

/// Path segments or query values treated as language markers.
const LANG_MARKERS: &[&str] = &["en", "ja", "jp", "eng", "jpn", "english", "japanese"];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DocAlignError {
    #[error("URLs are on different hosts: {0} vs {1}")]
    DifferentHosts(String, String),
    #[error("malformed URL {0:?}")]
    BadUrl(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DocPair<'a> {
    pub src_doc: &'a TextDocument,
    pub tgt_doc: &'a TextDocument,
    pub url_score: f64,
    pub content_score: f64,
    pub combined_score: f64,
}

fn is_marker(s: &str) -> bool {
    LANG_MARKERS.iter().any(|m| m.eq_ignore_ascii_case(s))
}

/// Path without language markers: `/en/about?lang=en&p=2` → `about?p=2`.
fn stripped_path(url: &Url) -> String {
    let segments: Vec<&str> = url
        .path_segments()
        .map(|s| s.filter(|seg| !seg.is_empty() && !is_marker(seg)).collect())
        .unwrap_or_default();
    let mut out = segments.join("/");
    if let Some(q) = url.query() {
        let kept: Vec<&str> = q
            .split('&')
            .filter(|kv| !kv.is_empty())
            .filter(|kv| !is_marker(kv.split_once('=').map_or(*kv, |(_, v)| v)))
            .collect();
        if !kept.is_empty() {
            out.push('?');
            out.push_str(&kept.join("&"));
        }
    }
    out
}

/// 1 − normalized Levenshtein distance between the marker-stripped paths.
pub fn url_similarity(url_a: &str, url_b: &str) -> Result<f64, DocAlignError> {
    let a = Url::parse(url_a).map_err(|_| DocAlignError::BadUrl(url_a.to_owned()))?;
    let b = Url::parse(url_b).map_err(|_| DocAlignError::BadUrl(url_b.to_owned()))?;
    if a.host_str() != b.host_str() {
        return Err(DocAlignError::DifferentHosts(url_a.to_owned(), url_b.to_owned()));
    }
    Ok(strsim::normalized_levenshtein(&stripped_path(&a), &stripped_path(&b)))
}

fn bag(tokens: impl IntoIterator<Item = (String, f64)>) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (t, w) in tokens {
        *out.entry(t).or_insert(0.0) += w;
    }
    out
}

fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, v)| b.get(k).map(|w| v * w)).sum();
    let norm = |m: &BTreeMap<String, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let denom = norm(a) * norm(b);
    if denom == 0.0 {
        0.0
    } else {
        (dot / denom).clamp(0.0, 1.0)
    }
}

/// Cosine between the source bag of words translated through the lexicon and
/// the target bag. A Japanese/English argument order is swapped first, so the
/// score is symmetric.
pub fn content_similarity(src: &TextDocument, tgt: &TextDocument, lexicon: &Lexicon) -> f64 {
    let (src, tgt) = if src.lang.is_ja() && !tgt.lang.is_ja() { (tgt, src) } else { (src, tgt) };
    let src_tokens = src.sentences.iter().flat_map(|s| tokenize(s, &src.lang, lexicon));
    let translated = bag(src_tokens.flat_map(|tok| {
        if is_digit_string(&tok) {
            return vec![(tok, 1.0)];
        }
        lexicon
            .translate(&tok)
            .map(|ts| ts.iter().map(|(t, w)| (t.clone(), *w)).collect())
            .unwrap_or_default()
    }));
    let target = bag(tgt.sentences.iter().flat_map(|s| tokenize(s, &tgt.lang, lexicon)).map(|t| (t, 1.0)));
    cosine(&translated, &target)
}

/// Greedy one-to-one matching of `en_docs` with `ja_docs` on
/// `0.5 · url_similarity + 0.5 · content_similarity`, best first; pairs below
/// `min_score` are discarded. Ties go to the lexicographically smaller URLs.
pub fn pair_documents<'a>(
    en_docs: &'a [TextDocument],
    ja_docs: &'a [TextDocument],
    lexicon: &Lexicon,
    min_score: f64,
) -> Vec<DocPair<'a>> {
    let mut candidates: Vec<DocPair<'a>> = en_docs
        .par_iter()
        .flat_map_iter(|src| {
            ja_docs.iter().filter_map(move |tgt| {
                let url_score = url_similarity(&src.url, &tgt.url).ok()?;
                let content_score = content_similarity(src, tgt, lexicon);
                let combined_score = 0.5 * url_score + 0.5 * content_score;
                (combined_score >= min_score).then_some(DocPair { src_doc: src, tgt_doc: tgt, url_score, content_score, combined_score })
            })
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.combined_score
            .total_cmp(&a.combined_score)
            .then_with(|| a.src_doc.url.cmp(&b.src_doc.url))
            .then_with(|| a.tgt_doc.url.cmp(&b.tgt_doc.url))
    });
    let mut used_src: HashSet<&str> = HashSet::new();
    let mut used_tgt: HashSet<&str> = HashSet::new();
    candidates
        .into_iter()
        .filter(|p| {
            if used_src.contains(p.src_doc.url.as_str()) || used_tgt.contains(p.tgt_doc.url.as_str()) {
                return false;
            }
            used_src.insert(&p.src_doc.url);
            used_tgt.insert(&p.tgt_doc.url);
            true
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LangCode;
    use proptest::prelude::*;

    fn doc(url: &str, lang: LangCode, text: &[&str]) -> TextDocument {
        TextDocument::new(url, lang, text.iter().map(|s| s.to_string()).collect())
    }

    fn lex() -> Lexicon {
        Lexicon::from_entries([("dog", "犬", 1.0), ("cat", "猫", 1.0), ("bird", "鳥", 1.0), ("fish", "魚", 1.0)])
    }

    #[test]
    fn url_examples() {
        assert_eq!(url_similarity("http://a.com/en/about", "http://a.com/ja/about").unwrap(), 1.0);
        assert_eq!(url_similarity("http://a.com/a", "http://a.com/b").unwrap(), 0.0);
        assert_eq!(url_similarity("http://a.com/p?lang=EN&id=3", "http://a.com/p?lang=ja&id=3").unwrap(), 1.0);
        assert_eq!(url_similarity("http://a.com/English/x", "http://a.com/Japanese/x").unwrap(), 1.0);
        assert!(matches!(url_similarity("http://a.com/", "http://b.com/"), Err(DocAlignError::DifferentHosts(..))));
    }

    #[test]
    fn content_examples() {
        let l = lex();
        let en = doc("http://a/en", LangCode::en(), &["dog cat dog"]);
        let ja = doc("http://a/ja", LangCode::ja(), &["犬猫犬"]);
        assert!((content_similarity(&en, &ja, &l) - 1.0).abs() < 1e-12);
        assert_eq!(content_similarity(&en, &ja, &Lexicon::new()), 0.0);
        let empty = doc("http://a/x", LangCode::ja(), &[]);
        assert_eq!(content_similarity(&en, &empty, &l), 0.0);
    }

    #[test]
    fn content_hand_computed() {
        let l = lex();
        // translated {犬:1, 猫:1, 2020:1}; target {犬:2, と:2, 鳥:1, 2020:1}
        // dot = 2 + 1 = 3; |a| = sqrt 3; |b| = sqrt 10
        let en = doc("http://a/en", LangCode::en(), &["The dog and cat in 2020."]);
        let ja = doc("http://a/ja", LangCode::ja(), &["犬と犬と鳥、2020。"]);
        let expected = 3.0 / 30f64.sqrt();
        assert!((content_similarity(&en, &ja, &l) - expected).abs() < 1e-12);
        assert_eq!(content_similarity(&ja, &en, &l), content_similarity(&en, &ja, &l));
    }

    #[test]
    fn pairing_examples() {
        let l = lex();
        let en = vec![doc("http://a/en/p1", LangCode::en(), &["dog"])];
        let ja = vec![doc("http://a/ja/p1", LangCode::ja(), &["犬"])];
        let pairs = pair_documents(&en, &ja, &l, DEFAULT_MIN_DOC_SCORE);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].combined_score, 1.0);
        assert!(pair_documents(&en, &ja, &l, 1.01).is_empty());
    }

    /// Re-derives the greedy matching by repeatedly scanning for the best remaining pair.
    fn greedy_oracle(en: &[TextDocument], ja: &[TextDocument], l: &Lexicon, min: f64) -> Vec<(String, String)> {
        let mut used_e = vec![false; en.len()];
        let mut used_j = vec![false; ja.len()];
        let mut out = Vec::new();
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, e) in en.iter().enumerate() {
                for (k, j) in ja.iter().enumerate() {
                    if used_e[i] || used_j[k] {
                        continue;
                    }
                    let s = 0.5 * url_similarity(&e.url, &j.url).unwrap() + 0.5 * content_similarity(e, j, l);
                    if s < min {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bs, bi, bk)) => s > bs || (s == bs && (&e.url, &j.url) < (&en[bi].url, &ja[bk].url)),
                    };
                    if better {
                        best = Some((s, i, k));
                    }
                }
            }
            let Some((_, i, k)) = best else { break };
            used_e[i] = true;
            used_j[k] = true;
            out.push((en[i].url.clone(), ja[k].url.clone()));
        }
        out
    }

    proptest! {
        #[test]
        fn greedy_matches_oracle(
            en_words in proptest::collection::vec(proptest::collection::vec(0usize..6, 1..6), 1..=6),
            ja_words in proptest::collection::vec(proptest::collection::vec(0usize..6, 1..6), 1..=6),
            min in 0.0f64..0.6,
        ) {
            let ew = ["dog", "cat", "bird", "fish", "tree", "7"];
            let jw = ["犬", "猫", "鳥", "魚", "木", "7"];
            let en: Vec<TextDocument> = en_words.iter().enumerate().map(|(i, ws)| {
                let text = ws.iter().map(|w| ew[*w]).collect::<Vec<_>>().join(" ");
                doc(&format!("http://s/en/p{}", i % 3), LangCode::en(), &[&text])
            }).enumerate().map(|(i, mut d)| { d.url.push_str(&format!("x{i}")); d }).collect();
            let ja: Vec<TextDocument> = ja_words.iter().enumerate().map(|(i, ws)| {
                let text = ws.iter().map(|w| jw[*w]).collect::<Vec<_>>().join("、");
                doc(&format!("http://s/ja/p{}x{i}", i % 4), LangCode::ja(), &[&text])
            }).collect();
            let l = lex();
            let got: Vec<(String, String)> = pair_documents(&en, &ja, &l, min)
                .iter().map(|p| (p.src_doc.url.clone(), p.tgt_doc.url.clone())).collect();
            prop_assert_eq!(got, greedy_oracle(&en, &ja, &l, min));

            let pairs = pair_documents(&en, &ja, &l, min);
            prop_assert!(pairs.windows(2).all(|w| w[0].combined_score >= w[1].combined_score));
            prop_assert!(pairs.iter().all(|p| p.combined_score >= min));
        }

        #[test]
        fn url_similarity_symmetric(a in "(/(en|ja|JP|[a-z]{1,4})){0,4}", b in "(/(en|ja|jp|[a-z]{1,4})){0,4}") {
            let (ua, ub) = (format!("http://h.com{a}"), format!("http://h.com{b}"));
            let s1 = url_similarity(&ua, &ub).unwrap();
            let s2 = url_similarity(&ub, &ua).unwrap();
            prop_assert_eq!(s1, s2);
            prop_assert!((0.0..=1.0).contains(&s1));
        }
    }
}

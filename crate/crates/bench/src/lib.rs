//! Workloads for the benchmarks, built from the synthetic fixture.

use chrono::DateTime;
use paramine::extract::{extract_text, split_sentences};
use paramine::synth::{self, SynthConfig};
use paramine::{LangCode, Lexicon, RawDocument};

pub struct Workload {
    pub lexicon: Lexicon,
    /// Every HTML page of the bilingual sites.
    pub pages: Vec<RawDocument>,
    /// Sentences of matching English and Japanese pages.
    pub page_pairs: Vec<(Vec<String>, Vec<String>)>,
}

pub fn workload(seed: u64) -> Workload {
    let fx = synth::generate(&SynthConfig { seed, ..SynthConfig::default() }).expect("fixture generation");
    let lexicon = Lexicon::load(&fx.files[synth::LEXICON_FILE][..]).expect("fixture lexicon");
    let prefix = format!("{}/", synth::SITES_DIR);
    let pages: Vec<RawDocument> = fx
        .files
        .iter()
        .filter_map(|(path, body)| {
            let rel = path.strip_prefix(&prefix)?;
            rel.ends_with(".html").then(|| {
                RawDocument::new(&format!("http://{rel}"), DateTime::UNIX_EPOCH, "text/html; charset=utf-8", body.clone())
                    .expect("fixture paths form URLs")
            })
        })
        .collect();
    let sentences = |doc: &RawDocument, lang: &LangCode| split_sentences(&extract_text(&doc.body, None), lang);
    let page_pairs = pages
        .iter()
        .filter(|d| d.url.contains("/en/"))
        .filter_map(|en| {
            let ja = pages.iter().find(|d| d.url == en.url.replace("/en/", "/ja/"))?;
            Some((sentences(en, &LangCode::en()), sentences(ja, &LangCode::ja())))
        })
        .collect();
    Workload { lexicon, pages, page_pairs }
}

#[cfg(test)]
mod tests {
    #[test]
    fn workload_has_pairs() {
        let w = super::workload(1);
        assert!(w.page_pairs.len() >= 10);
        assert!(w.page_pairs.iter().all(|(s, t)| !s.is_empty() && !t.is_empty()));
    }
}

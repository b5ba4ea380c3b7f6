//! Deterministic synthetic bilingual web fixture: sites to crawl, a crawl-like
//! archive for domain ranking, a toy lexicon, a seed corpus and gold pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use chrono::{TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{serialize_pairs, RawDocument, SentencePair};
use crate::extract::DEFAULT_ABBREVIATIONS;
use crate::warc::WarcWriter;

pub const SITES_DIR: &str = "sites";
pub const CC_ARCHIVE: &str = "cc/crawl.warc.gz";
pub const LEXICON_FILE: &str = "lexicon.tsv";
pub const SEED_CORPUS_FILE: &str = "seed_corpus.tsv";
pub const GOLD_FILE: &str = "gold.tsv";

const EN_FUNCTION_WORDS: &[&str] = &["the", "of", "and", "in", "to", "with", "for", "on", "at", "by"];
const JA_PARTICLES: &[&str] = &["は", "が", "を", "に", "の", "で", "と", "も"];
const JA_ENDINGS: &[&str] = &["です。", "ます。", "でした。", "ません。"];
const CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'h', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'z'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];
const KANJI: &str = "山川田中村本木林森石花水火金土日月年人大小上下左右東西南北前後内外市町国家会社学校\
                     電車道駅店食飲見聞話読書生活時間場所自然世界社会経済政治文化科学技術音楽映画写真";
const KATAKANA: &str = "アイウエオカキクケコサシスセソタチツテトナニヌネノハヒフヘホマミムメモヤユヨラリルレロワン";

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Bilingual sites carrying gold pairs.
    pub domains: usize,
    pub pairs_per_domain: usize,
    pub sentences_per_page: usize,
    pub noise_sentences: usize,
    pub content_vocab: usize,
    pub lexicon_entries: usize,
    pub seed_pairs: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 20_200_511,
            domains: 2,
            pairs_per_domain: 10,
            sentences_per_page: 15,
            noise_sentences: 100,
            content_vocab: 600,
            lexicon_entries: 500,
            seed_pairs: 400,
        }
    }
}

/// Generated files keyed by path relative to the fixture root.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthFixture {
    pub files: BTreeMap<String, Vec<u8>>,
    pub gold: Vec<(String, String)>,
    pub bilingual_domains: Vec<String>,
    /// Bilingual but below any sensible archive-size floor.
    pub tiny_domain: String,
}

impl SynthFixture {
    pub fn write_to(&self, root: &Path) -> io::Result<()> {
        for (rel, bytes) in &self.files {
            let path = root.join(rel);
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, bytes)?;
        }
        Ok(())
    }
}

struct Vocab {
    /// (english, japanese) content words; the first `lexicon_entries` are in the lexicon.
    content: Vec<(String, String)>,
    en_noise: Vec<String>,
    ja_noise: Vec<String>,
}

fn en_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(*CONSONANTS.choose(rng).unwrap());
        w.push(*VOWELS.choose(rng).unwrap());
    }
    if rng.random_bool(0.5) {
        w.push(*CONSONANTS.choose(rng).unwrap());
    }
    w
}

fn ja_word(rng: &mut ChaCha8Rng) -> String {
    if rng.random_bool(0.6) {
        let kanji: Vec<char> = KANJI.chars().collect();
        (0..2).map(|_| *kanji.choose(rng).unwrap()).collect()
    } else {
        let kana: Vec<char> = KATAKANA.chars().collect();
        let n = rng.random_range(3..=4);
        (0..n).map(|_| *kana.choose(rng).unwrap()).collect()
    }
}

fn build_vocab(rng: &mut ChaCha8Rng, config: &SynthConfig) -> Vocab {
    let reserved: BTreeSet<String> = DEFAULT_ABBREVIATIONS
        .iter()
        .map(|a| a.to_lowercase())
        .chain(EN_FUNCTION_WORDS.iter().map(|w| w.to_string()))
        .collect();
    let mut seen_en = reserved;
    let mut seen_ja = BTreeSet::new();
    let mut fresh_en = |rng: &mut ChaCha8Rng| loop {
        let w = en_word(rng);
        if seen_en.insert(w.clone()) {
            return w;
        }
    };
    let mut fresh_ja = |rng: &mut ChaCha8Rng| loop {
        let w = ja_word(rng);
        if seen_ja.insert(w.clone()) {
            return w;
        }
    };
    let content = (0..config.content_vocab).map(|_| (fresh_en(rng), fresh_ja(rng))).collect();
    let en_noise = (0..300).map(|_| fresh_en(rng)).collect();
    let ja_noise = (0..300).map(|_| fresh_ja(rng)).collect();
    Vocab { content, en_noise, ja_noise }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// One parallel sentence: English words with function words, Japanese
/// translations joined by particles.
fn parallel_sentence(rng: &mut ChaCha8Rng, vocab: &Vocab) -> (String, String) {
    let n = rng.random_range(5..=10);
    let mut en = Vec::new();
    let mut ja = String::new();
    let number = rng.random_bool(0.15).then(|| rng.random_range(1990..2030));
    for i in 0..n {
        let (e, j) = vocab.content.choose(rng).unwrap();
        if i > 0 && rng.random_bool(0.5) {
            en.push(EN_FUNCTION_WORDS.choose(rng).unwrap().to_string());
        }
        en.push(e.clone());
        ja.push_str(j);
        if i + 1 < n {
            ja.push_str(JA_PARTICLES.choose(rng).unwrap());
        }
        if i == n / 2 {
            if let Some(year) = number {
                en.push(format!("in {year}"));
                ja.push_str(&format!("{year}年に"));
            }
        }
    }
    let mut en = capitalize(&en.join(" "));
    en.push('.');
    ja.push_str(JA_ENDINGS.choose(rng).unwrap());
    (en, ja)
}

/// Long untranslated block: merging it into a neighbouring bead costs more
/// than skipping it. Japanese blocks run at roughly the content character
/// ratio so a page's length ratio does not drift with the side noise lands on.
fn noise_sentence(rng: &mut ChaCha8Rng, vocab: &Vocab, japanese: bool) -> String {
    if japanese {
        let n = rng.random_range(180..=240);
        let mut s = String::new();
        for i in 0..n {
            s.push_str(vocab.ja_noise.choose(rng).unwrap());
            if i + 1 < n {
                s.push_str(JA_PARTICLES.choose(rng).unwrap());
            }
        }
        s.push_str(JA_ENDINGS.choose(rng).unwrap());
        s
    } else {
        let n = rng.random_range(220..=300);
        let words: Vec<&str> = (0..n).map(|_| vocab.en_noise.choose(rng).unwrap().as_str()).collect();
        let mut s = capitalize(&words.join(" "));
        s.push('.');
        s
    }
}

struct Page<'a> {
    lang: &'a str,
    title: String,
    nav: String,
    sentences: Vec<String>,
    footer: String,
    extra_body: String,
}

fn render(page: &Page<'_>, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let joiner = if page.lang == "ja" { "" } else { " " };
    let mut paragraphs = String::new();
    let mut rest = &page.sentences[..];
    while !rest.is_empty() {
        let take = rng.random_range(3..=5).min(rest.len());
        paragraphs.push_str(&format!("<p>{}</p>\n", rest[..take].join(joiner)));
        rest = &rest[take..];
    }
    format!(
        "<!DOCTYPE html>\n<html lang=\"{lang}\">\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n\
         <style>body {{ font-family: sans-serif; }}</style>\n<script>window.dataLayer = [];</script>\n</head>\n<body>\n\
         <nav>{nav}</nav>\n<main>\n{paragraphs}{extra}</main>\n<footer>{footer}</footer>\n</body>\n</html>\n",
        lang = page.lang,
        title = page.title,
        nav = page.nav,
        paragraphs = paragraphs,
        extra = page.extra_body,
        footer = page.footer,
    )
    .into_bytes()
}

fn footer(domain: &str) -> String {
    let name = capitalize(domain.split('.').next().unwrap_or(domain));
    format!("&copy; 2024 {name} Example Inc. All rights reserved.")
}

fn nav(lang: &str, counterpart: Option<&str>) -> String {
    let (home, other) = if lang == "ja" { ("ホーム", "English") } else { ("Home", "日本語") };
    match counterpart {
        Some(href) => format!("<a href=\"/index.html\">{home}</a> | <a href=\"{href}\">{other}</a>"),
        None => format!("<a href=\"/index.html\">{home}</a>"),
    }
}

fn index_page(domain: &str, links: &[String]) -> Vec<u8> {
    let items: String = links
        .iter()
        .map(|href| {
            let label = if href.contains("/ja/") { "続きを読む" } else { "Read more" };
            format!("<li><a href=\"{href}\">{label}</a></li>\n")
        })
        .collect();
    format!(
        "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>{domain}</title></head>\n<body>\n<ul>\n{items}\
         <li><a href=\"/private/drafts.html\">Drafts</a></li>\n<li><a href=\"http://elsewhere.example/\">Partner</a></li>\n\
         </ul>\n</body>\n</html>\n"
    )
    .into_bytes()
}

const ROBOTS: &str = "User-agent: *\nDisallow: /private/\n";

/// Builds one bilingual site; returns gold pairs.
fn build_site(
    rng: &mut ChaCha8Rng,
    vocab: &Vocab,
    domain: &str,
    pairs: usize,
    sentences: usize,
    noise_per_page: &[usize],
    files: &mut BTreeMap<String, Vec<u8>>,
) -> Vec<(String, String)> {
    let root = format!("{SITES_DIR}/{domain}");
    let mut gold = Vec::new();
    let mut links = Vec::new();
    for k in 0..pairs {
        let (en_path, ja_path) = (format!("/en/page{k}.html"), format!("/ja/page{k}.html"));
        let parallel: Vec<(String, String)> = (0..sentences).map(|_| parallel_sentence(rng, vocab)).collect();
        let mut en: Vec<String> = parallel.iter().map(|p| p.0.clone()).collect();
        let mut ja: Vec<String> = parallel.iter().map(|p| p.1.clone()).collect();
        // Sides alternate so neither language's total swells on one page.
        let first_ja = rng.random_bool(0.5);
        for t in 0..noise_per_page[k] {
            let japanese = (t % 2 == 0) == first_ja;
            let side = if japanese { &mut ja } else { &mut en };
            let at = rng.random_range(0..=side.len());
            side.insert(at, noise_sentence(rng, vocab, japanese));
        }
        gold.extend(parallel);
        let en_page = Page {
            lang: "en",
            title: format!("{domain} page {k}"),
            nav: nav("en", Some(&ja_path)),
            sentences: en,
            footer: footer(domain),
            extra_body: String::new(),
        };
        let ja_page = Page {
            lang: "ja",
            title: format!("{domain} ページ{k}"),
            nav: nav("ja", Some(&en_path)),
            sentences: ja,
            footer: footer(domain),
            extra_body: String::new(),
        };
        files.insert(format!("{root}{en_path}"), render(&en_page, rng));
        files.insert(format!("{root}{ja_path}"), render(&ja_page, rng));
        links.push(en_path);
        links.push(ja_path);
    }
    // English-only page with no counterpart.
    let news = Page {
        lang: "en",
        title: format!("{domain} news"),
        nav: nav("en", None),
        sentences: (0..6).map(|_| parallel_sentence(rng, vocab).0).collect(),
        footer: footer(domain),
        extra_body: "<script>document.write('tracking');</script>\n".into(),
    };
    files.insert(format!("{root}/en/news.html"), render(&news, rng));
    links.push("/en/news.html".into());
    files.insert(format!("{root}/index.html"), index_page(domain, &links));
    files.insert(format!("{root}/robots.txt"), ROBOTS.as_bytes().to_vec());
    let secret = Page {
        lang: "en",
        title: "drafts".into(),
        nav: nav("en", None),
        sentences: (0..4).map(|_| parallel_sentence(rng, vocab).0).collect(),
        footer: footer(domain),
        extra_body: String::new(),
    };
    files.insert(format!("{root}/private/drafts.html"), render(&secret, rng));
    gold
}

fn cc_page(rng: &mut ChaCha8Rng, vocab: &Vocab, en: usize, ja: usize) -> Vec<u8> {
    let mut body = String::new();
    for _ in 0..en {
        body.push_str(&format!("<p>{}</p>\n", parallel_sentence(rng, vocab).0));
    }
    for _ in 0..ja {
        body.push_str(&format!("<p>{}</p>\n", parallel_sentence(rng, vocab).1));
    }
    format!("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"></head><body>\n{body}</body></html>\n").into_bytes()
}

/// Crawl-like archive: per domain, `(pages, en sentences, ja sentences)` per page.
fn cc_archive(rng: &mut ChaCha8Rng, vocab: &Vocab, domains: &[(String, usize, usize, usize)]) -> io::Result<Vec<u8>> {
    let fetched = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    let mut writer = WarcWriter::new(Vec::new())?;
    for (domain, pages, en, ja) in domains {
        for p in 0..*pages {
            let url = format!("http://{domain}/p{p}.html");
            let doc = RawDocument::new(&url, fetched, "text/html; charset=utf-8", cc_page(rng, vocab, *en, *ja))
                .expect("static URL");
            writer.write_document(&doc)?;
        }
    }
    writer.finish()
}

fn spread(total: usize, buckets: usize) -> Vec<usize> {
    (0..buckets).map(|i| total / buckets + usize::from(i < total % buckets)).collect()
}

pub fn generate(config: &SynthConfig) -> io::Result<SynthFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let vocab = build_vocab(&mut rng, config);
    let mut files = BTreeMap::new();

    let mut lexicon = String::new();
    for (en, ja) in vocab.content.iter().take(config.lexicon_entries) {
        lexicon.push_str(&format!("{en}\t{ja}\t1.0\n"));
    }
    files.insert(LEXICON_FILE.to_owned(), lexicon.into_bytes());

    let names = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"];
    let bilingual: Vec<String> = (0..config.domains)
        .map(|i| format!("{}.example", names.get(i).map_or_else(|| format!("site{i}"), |n| n.to_string())))
        .collect();
    let noise = spread(config.noise_sentences, config.domains * config.pairs_per_domain);
    let mut gold = Vec::new();
    for (d, domain) in bilingual.iter().enumerate() {
        let per_page = &noise[d * config.pairs_per_domain..(d + 1) * config.pairs_per_domain];
        gold.extend(build_site(&mut rng, &vocab, domain, config.pairs_per_domain, config.sentences_per_page, per_page, &mut files));
    }
    let tiny = "tiny.example".to_owned();
    build_site(&mut rng, &vocab, &tiny, 1, 2, &[0], &mut files);

    let mut cc_domains: Vec<(String, usize, usize, usize)> =
        bilingual.iter().map(|d| (d.clone(), 6, 8, 8)).collect();
    cc_domains.push((tiny.clone(), 2, 4, 4));
    cc_domains.push(("mostly-english.example".into(), 6, 20, 2));
    cc_domains.push(("english-only.example".into(), 4, 10, 0));
    cc_domains.push(("japanese-only.example".into(), 4, 0, 10));
    cc_domains.push(("lopsided.example".into(), 4, 10, 3));
    files.insert(CC_ARCHIVE.to_owned(), cc_archive(&mut rng, &vocab, &cc_domains)?);

    let seed: Vec<SentencePair> = (0..config.seed_pairs)
        .map(|i| {
            let (en, ja) = parallel_sentence(&mut rng, &vocab);
            SentencePair {
                src_url: format!("http://seed.invalid/en/{i}"),
                tgt_url: format!("http://seed.invalid/ja/{i}"),
                ..SentencePair::bare(en, ja)
            }
        })
        .collect();
    let mut seed_tsv = Vec::new();
    serialize_pairs(&seed, &mut seed_tsv).map_err(io::Error::other)?;
    files.insert(SEED_CORPUS_FILE.to_owned(), seed_tsv);

    let mut gold_tsv = String::new();
    for (en, ja) in &gold {
        gold_tsv.push_str(&format!("{en}\t{ja}\n"));
    }
    files.insert(GOLD_FILE.to_owned(), gold_tsv.into_bytes());

    Ok(SynthFixture { files, gold, bilingual_domains: bilingual, tiny_domain: tiny })
}

/// Reads `src\ttgt` gold lines.
pub fn parse_gold(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(a, b)| (a.to_owned(), b.to_owned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_text, split_sentences};
    use crate::corpus::LangCode;

    fn small() -> SynthConfig {
        SynthConfig { pairs_per_domain: 3, noise_sentences: 6, seed_pairs: 10, ..SynthConfig::default() }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&small()).unwrap(), generate(&small()).unwrap());
        let other = generate(&SynthConfig { seed: 1, ..small() }).unwrap();
        assert_ne!(other.gold, generate(&small()).unwrap().gold);
    }

    #[test]
    fn default_shape() {
        let f = generate(&SynthConfig::default()).unwrap();
        assert_eq!(f.gold.len(), 300);
        let lexicon_lines = f.files[LEXICON_FILE].iter().filter(|b| **b == b'\n').count();
        assert_eq!(lexicon_lines, 500);
        // Crawlable pages on the two bilingual sites: 20 pairs, 2 news pages, 2 indexes.
        let pages = f
            .files
            .keys()
            .filter(|k| k.ends_with(".html") && !k.contains("/private/"))
            .filter(|k| f.bilingual_domains.iter().any(|d| k.starts_with(&format!("{SITES_DIR}/{d}/"))))
            .count();
        assert_eq!(pages, 44);
    }

    #[test]
    fn gold_sentences_survive_extraction() {
        let f = generate(&small()).unwrap();
        let page = &f.files["sites/alpha.example/en/page0.html"];
        let sentences = split_sentences(&extract_text(page, None), &LangCode::en());
        for (en, _) in f.gold.iter().take(15) {
            assert!(sentences.contains(en), "missing {en:?}");
        }
        let page = &f.files["sites/alpha.example/ja/page0.html"];
        let sentences = split_sentences(&extract_text(page, None), &LangCode::ja());
        for (_, ja) in f.gold.iter().take(15) {
            assert!(sentences.contains(ja), "missing {ja:?}");
        }
    }
}

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use paramine::crawler::{crawl_domain, CrawlSummary, DirectoryFetcher, Fetcher, HttpFetcher};
use paramine::docalign::pair_documents;
use paramine::extract::{charset_from_content_type, extract_text, SentenceSplitter};
use paramine::filter::{filter_corpus, train_filter, write_model};
use paramine::ingest::{filter_small_domains, read_archive};
use paramine::langstat::{
    lang_bytes_of_text, rank_domains, train_langid_for, write_stats_report, LangIdModel, LanguageDetector,
    StatsAccumulator,
};
use paramine::sentalign::{align_sentences, extract_pairs};
use paramine::warc::WarcWriter;
use paramine::{corpus, LangCode, Lexicon, RawDocument, SentencePair, TextDocument};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{self, *};
use crate::config::Config;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Rank,
    Crawl,
    Ingest,
    Extract,
    Docalign,
    Align,
    Filter,
    Stats,
    Pipeline,
}

impl Stage {
    /// Stages `pipeline` runs, in order.
    pub const CHAIN: [Stage; 8] = [
        Stage::Rank,
        Stage::Crawl,
        Stage::Ingest,
        Stage::Extract,
        Stage::Docalign,
        Stage::Align,
        Stage::Filter,
        Stage::Stats,
    ];
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Rank => "rank",
            Stage::Crawl => "crawl",
            Stage::Ingest => "ingest",
            Stage::Extract => "extract",
            Stage::Docalign => "docalign",
            Stage::Align => "align",
            Stage::Filter => "filter",
            Stage::Stats => "stats",
            Stage::Pipeline => "pipeline",
        };
        f.write_str(name)
    }
}

pub fn run(stage: Stage, config: &Config) -> Result<(), CliError> {
    if stage == Stage::Pipeline {
        return Stage::CHAIN.iter().try_for_each(|s| run(*s, config));
    }
    let started = Instant::now();
    let work = config.work_dir.as_path();
    match stage {
        Stage::Rank => rank(config, work)?,
        Stage::Crawl => crawl(config, work)?,
        Stage::Ingest => ingest(config, work)?,
        Stage::Extract => extract(config, work)?,
        Stage::Docalign => docalign(config, work)?,
        Stage::Align => align(config, work)?,
        Stage::Filter => filter(config, work)?,
        Stage::Stats => stats(work)?,
        Stage::Pipeline => unreachable!(),
    }
    log::info!("{stage} finished in {:.2?}", started.elapsed());
    Ok(())
}

fn invalid(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Invalid(format!("{}: {e}", path.display()))
}

fn load_lexicon(config: &Config) -> Result<Lexicon, CliError> {
    let path = &config.inputs.lexicon;
    Lexicon::load(artifacts::open(path)?).map_err(|e| invalid(path, e))
}

fn load_corpus(path: &Path) -> Result<Vec<SentencePair>, CliError> {
    corpus::parse_pairs(artifacts::open(path)?).map_err(|e| invalid(path, e))
}

/// Character n-gram model trained on the two sides of the seed corpus.
fn load_langid(config: &Config) -> Result<LangIdModel, CliError> {
    let seed = load_corpus(&config.inputs.seed_corpus)?;
    let samples: Vec<(LangCode, String)> = seed
        .iter()
        .flat_map(|p| [(LangCode::en(), p.src_text.clone()), (LangCode::ja(), p.tgt_text.clone())])
        .collect();
    let model = train_langid_for(&[LangCode::en(), LangCode::ja()], &samples, config.langid.ngram_order)
        .map_err(|e| invalid(&config.inputs.seed_corpus, e))?;
    Ok(model.with_other_threshold(config.langid.other_threshold))
}

fn document_text(doc: &RawDocument) -> String {
    extract_text(&doc.body, charset_from_content_type(&doc.content_type))
}

fn rank(config: &Config, work: &Path) -> Result<(), CliError> {
    if config.inputs.rank_archives.is_empty() {
        return Err(CliError::Invalid("inputs.rank_archives lists no archives".into()));
    }
    let langid = load_langid(config)?;
    let mut acc = StatsAccumulator::new();
    for path in &config.inputs.rank_archives {
        let mut docs = read_archive(path)?;
        let batch: Vec<RawDocument> = docs.by_ref().collect();
        if let Some(e) = docs.take_error() {
            return Err(CliError::Io { path: path.clone(), source: e });
        }
        let counted: Vec<(String, Vec<(LangCode, u64)>)> = batch
            .par_iter()
            .map(|d| (d.domain.clone(), lang_bytes_of_text(&langid, &document_text(d))))
            .collect();
        for (domain, langs) in counted {
            for (lang, bytes) in langs {
                acc.add(&domain, lang, bytes);
            }
        }
    }
    let stats = acc.finish();
    let ranked = rank_domains(&stats, config.rank.top_k);
    write_atomic(&work.join(DOMAIN_STATS), |w| write_stats_report(&stats, w))?;
    write_atomic(&work.join(DOMAINS), |w| ranked.iter().try_for_each(|d| writeln!(w, "{d}")))?;
    log::info!("ranked {} domains, kept {}", stats.len(), ranked.len());
    Ok(())
}

fn crawl(config: &Config, work: &Path) -> Result<(), CliError> {
    let domains = read_lines(&work.join(DOMAINS))?;
    let budget = config.crawl_budget()?;
    let fetcher: Box<dyn Fetcher> = match &config.crawl.site_root {
        Some(root) => Box::new(DirectoryFetcher::new(root)),
        None => Box::new(HttpFetcher::new(&config.crawl.user_agent, config.crawl_timeout()?)),
    };
    let results: Vec<Result<(String, CrawlSummary, Vec<RawDocument>), (String, String)>> = domains
        .par_iter()
        .map(|domain| {
            let mut docs = Vec::new();
            crawl_domain(&format!("http://{domain}/"), &budget, fetcher.as_ref(), &config.crawl.user_agent, |d| {
                docs.push(d)
            })
            .map(|summary| (domain.clone(), summary, docs))
            .map_err(|e| (domain.clone(), e.to_string()))
        })
        .collect();
    let mut report = String::from("domain\tpages\tbytes\trequests\tfailures\tstopped\n");
    for result in results {
        match result {
            Ok((domain, s, docs)) => {
                write_atomic(&archive_path(work, &domain), |w| {
                    let mut writer = WarcWriter::new(w)?;
                    docs.iter().try_for_each(|d| writer.write_document(d))?;
                    writer.finish().map(drop)
                })?;
                report.push_str(&format!(
                    "{domain}\t{}\t{}\t{}\t{}\t{}\n",
                    s.pages, s.bytes, s.requests, s.failures, s.stopped_reason
                ));
            }
            Err((domain, reason)) => {
                log::warn!("crawl of {domain} failed: {reason}");
                report.push_str(&format!("{domain}\t0\t0\t0\t0\terror\n"));
            }
        }
    }
    write_atomic(&work.join(CRAWL_REPORT), |w| w.write_all(report.as_bytes()))
}

/// Archives in the work directory, keyed by the domain in their file name.
fn list_archives(work: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let dir = work.join(ARCHIVES_DIR);
    let entries = fs::read_dir(&dir).map_err(|e| CliError::from_io(&dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::from_io(&dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(domain) = name.strip_suffix(".warc.gz").or_else(|| name.strip_suffix(".warc")) {
            out.insert(domain.to_owned(), path.clone());
        }
    }
    Ok(out)
}

fn ingest(config: &Config, work: &Path) -> Result<(), CliError> {
    let archives = list_archives(work)?;
    let mut sizes = BTreeMap::new();
    for (domain, path) in &archives {
        let len = fs::metadata(path).map_err(|e| CliError::from_io(path, e))?.len();
        sizes.insert(domain.clone(), len);
    }
    let kept = filter_small_domains(&sizes, config.ingest.min_domain_bytes);
    let mut report = String::from("domain\tarchive_bytes\tdocuments\tcorrupt\tkept\n");
    for (domain, path) in &archives {
        let (documents, corrupt) = if kept.contains(domain) {
            let mut docs = read_archive(path)?;
            let n = docs.by_ref().count();
            if let Some(e) = docs.take_error() {
                return Err(CliError::Io { path: path.clone(), source: e });
            }
            (n, docs.report().corrupt)
        } else {
            (0, 0)
        };
        report.push_str(&format!("{domain}\t{}\t{documents}\t{corrupt}\t{}\n", sizes[domain], kept.contains(domain)));
    }
    write_atomic(&work.join(INGEST_REPORT), |w| w.write_all(report.as_bytes()))?;
    write_atomic(&work.join(KEPT_DOMAINS), |w| kept.iter().try_for_each(|d| writeln!(w, "{d}")))?;
    log::info!("kept {} of {} domains", kept.len(), archives.len());
    Ok(())
}

fn extract(config: &Config, work: &Path) -> Result<(), CliError> {
    let kept = read_lines(&work.join(KEPT_DOMAINS))?;
    let langid = load_langid(config)?;
    let splitter = match &config.extract.abbreviations {
        Some(list) => SentenceSplitter::with_abbreviations(list.iter().cloned()),
        None => SentenceSplitter::default(),
    };
    let mut raw = Vec::new();
    for domain in &kept {
        let path = archive_path(work, domain);
        let mut docs = read_archive(&path)?;
        raw.extend(docs.by_ref());
        if let Some(e) = docs.take_error() {
            return Err(CliError::Io { path, source: e });
        }
    }
    let mut documents: Vec<TextDocument> = raw
        .par_iter()
        .filter_map(|d| {
            let text = document_text(d);
            let (lang, _) = langid.detect(&text).ok()?;
            if !(lang.is_en() || lang.is_ja()) {
                return None;
            }
            let doc = TextDocument::new(d.url.clone(), lang.clone(), splitter.split(&text, &lang));
            (!doc.is_empty()).then_some(doc)
        })
        .collect();
    documents.sort_by(|a, b| a.url.cmp(&b.url));
    documents.dedup_by(|a, b| a.url == b.url);
    log::info!("extracted {} documents from {} pages", documents.len(), raw.len());
    write_jsonl(&work.join(DOCUMENTS), &documents)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DocPairRecord {
    pub src_url: String,
    pub tgt_url: String,
    pub url_score: f64,
    pub content_score: f64,
    pub combined_score: f64,
}

fn host_of(url: &str) -> String {
    url::Url::parse(url).ok().and_then(|u| u.host_str().map(str::to_owned)).unwrap_or_default()
}

fn docalign(config: &Config, work: &Path) -> Result<(), CliError> {
    let documents: Vec<TextDocument> = read_jsonl(&work.join(DOCUMENTS))?;
    let lexicon = load_lexicon(config)?;
    let mut by_host: BTreeMap<String, (Vec<TextDocument>, Vec<TextDocument>)> = BTreeMap::new();
    for doc in documents {
        let entry = by_host.entry(host_of(&doc.url)).or_default();
        if doc.lang.is_en() {
            entry.0.push(doc);
        } else if doc.lang.is_ja() {
            entry.1.push(doc);
        }
    }
    let mut records = Vec::new();
    for (en, ja) in by_host.values() {
        for p in pair_documents(en, ja, &lexicon, config.docalign.min_score) {
            records.push(DocPairRecord {
                src_url: p.src_doc.url.clone(),
                tgt_url: p.tgt_doc.url.clone(),
                url_score: p.url_score,
                content_score: p.content_score,
                combined_score: p.combined_score,
            });
        }
    }
    log::info!("paired {} documents", records.len());
    write_jsonl(&work.join(DOC_PAIRS), &records)
}

fn write_corpus(path: &Path, pairs: &[SentencePair]) -> Result<(), CliError> {
    write_atomic(path, |w| {
        corpus::serialize_pairs(pairs, w).map(drop).map_err(std::io::Error::other)
    })
}

fn align(config: &Config, work: &Path) -> Result<(), CliError> {
    let pairs: Vec<DocPairRecord> = read_jsonl(&work.join(DOC_PAIRS))?;
    let documents: Vec<TextDocument> = read_jsonl(&work.join(DOCUMENTS))?;
    let lexicon = load_lexicon(config)?;
    let params = config.align_params()?;
    let by_url: HashMap<&str, &TextDocument> = documents.iter().map(|d| (d.url.as_str(), d)).collect();
    let min_score = config.align.min_align_score;
    let aligned: Vec<Vec<SentencePair>> = pairs
        .par_iter()
        .map(|p| {
            let missing = |u: &str| CliError::Invalid(format!("{DOC_PAIRS} names unknown document {u}"));
            let src = by_url.get(p.src_url.as_str()).ok_or_else(|| missing(&p.src_url))?;
            let tgt = by_url.get(p.tgt_url.as_str()).ok_or_else(|| missing(&p.tgt_url))?;
            let beads = align_sentences(&src.sentences, &tgt.sentences, &lexicon, &params)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(extract_pairs(&beads, src, tgt, min_score))
        })
        .collect::<Result<_, CliError>>()?;
    let corpus: Vec<SentencePair> = aligned.into_iter().flatten().collect();
    log::info!("aligned {} sentence pairs", corpus.len());
    write_corpus(&work.join(RAW_CORPUS), &corpus)
}

fn filter(config: &Config, work: &Path) -> Result<(), CliError> {
    let raw = load_corpus(&work.join(RAW_CORPUS))?;
    let positives = load_corpus(&config.inputs.seed_corpus)?;
    let lexicon = load_lexicon(config)?;
    let langid = load_langid(config)?;
    let trained = train_filter(&positives, &lexicon, &langid, &config.train_config())
        .map_err(|e| invalid(&config.inputs.seed_corpus, e))?;
    write_atomic(&work.join(FILTER_MODEL), |w| write_model(&trained.model, w))?;
    let (kept, report) = filter_corpus(&raw, &trained.model, &lexicon, &langid, config.filter.threshold)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    log::info!("kept {} of {} pairs", kept.len(), raw.len());
    write_corpus(&work.join(FILTERED_CORPUS), &kept)?;
    write_atomic(&work.join(REJECT_REPORT), |w| report.write_tsv(w))
}

/// Size counts for one corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub sentences: u64,
    pub src_words: u64,
    pub tgt_chars: u64,
}

/// Sentence pairs, whitespace tokens on the English side, non-space characters on the Japanese side.
pub fn corpus_stats(pairs: &[SentencePair]) -> CorpusStats {
    pairs.iter().fold(CorpusStats::default(), |mut s, p| {
        s.sentences += 1;
        s.src_words += p.src_text.split_whitespace().count() as u64;
        s.tgt_chars += p.tgt_text.chars().filter(|c| !c.is_whitespace()).count() as u64;
        s
    })
}

pub const STATS_HEADER: &str = "corpus\tsentences\tsrc_words\ttgt_chars";

fn stats(work: &Path) -> Result<(), CliError> {
    let raw = corpus_stats(&load_corpus(&work.join(RAW_CORPUS))?);
    let filtered = corpus_stats(&load_corpus(&work.join(FILTERED_CORPUS))?);
    let mut table = format!("{STATS_HEADER}\n");
    for (label, s) in [("raw", &raw), ("filtered", &filtered)] {
        table.push_str(&format!("{label}\t{}\t{}\t{}\n", s.sentences, s.src_words, s.tgt_chars));
    }
    write_atomic(&work.join(CORPUS_STATS), |w| w.write_all(table.as_bytes()))?;
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_definition() {
        let pairs = vec![SentencePair::bare("a b", "犬が 走る"), SentencePair::bare("c", "猫")];
        assert_eq!(corpus_stats(&pairs), CorpusStats { sentences: 2, src_words: 3, tgt_chars: 5 });
        assert_eq!(corpus_stats(&[]), CorpusStats::default());
    }

    #[test]
    fn stats_ignore_order() {
        let mut pairs: Vec<SentencePair> =
            (0..20).map(|i| SentencePair::bare("w ".repeat(i + 1), "字".repeat(i))).collect();
        let a = corpus_stats(&pairs);
        pairs.reverse();
        pairs.swap(3, 11);
        assert_eq!(corpus_stats(&pairs), a);
    }
}

//! Language identification, per-domain byte statistics and domain ranking.

mod langid;
mod stats;

pub use langid::{
    train_langid, train_langid_for, LangIdError, LangIdModel, LanguageDetector, DEFAULT_NGRAM_ORDER,
    DEFAULT_OTHER_THRESHOLD,
};
pub use stats::{
    accumulate_stats, rank_domains, rank_order, read_stats_report, write_stats_report, DomainStatsMap,
    StatsAccumulator,
};

use crate::corpus::LangCode;

/// Language byte counts of extracted text, detected line by line.
///
/// Lines the detector rejects (empty) are skipped; bytes are UTF-8 lengths.
pub fn lang_bytes_of_text<D: LanguageDetector + ?Sized>(detector: &D, text: &str) -> Vec<(LangCode, u64)> {
    text.lines()
        .filter_map(|line| {
            let (lang, _) = detector.detect(line).ok()?;
            Some((lang, line.trim().len() as u64))
        })
        .collect()
}

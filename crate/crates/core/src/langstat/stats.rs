//! Per-domain language statistics and candidate ranking.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use crate::corpus::{DomainLangStats, LangCode};

pub type DomainStatsMap = BTreeMap<String, DomainLangStats>;

/// Commutative, associative accumulation of `(domain, lang, bytes)` records.
#[derive(Clone, Debug, Default)]
pub struct StatsAccumulator {
    stats: DomainStatsMap,
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, domain: &str, lang: LangCode, bytes: u64) {
        self.stats
            .entry(domain.to_owned())
            .or_insert_with(|| DomainLangStats::new(domain))
            .add(lang, bytes);
    }

    /// Combines two partial accumulations (e.g. from parallel shards).
    pub fn merge(mut self, other: StatsAccumulator) -> StatsAccumulator {
        for (domain, s) in other.stats {
            let entry = self
                .stats
                .entry(domain.clone())
                .or_insert_with(|| DomainLangStats::new(domain));
            for (lang, bytes) in s.bytes_by_lang {
                *entry.bytes_by_lang.entry(lang).or_insert(0) += bytes;
            }
            entry.refresh_ratio();
        }
        self
    }

    pub fn finish(self) -> DomainStatsMap {
        self.stats
    }
}

pub fn accumulate_stats<I, D>(docs: I) -> DomainStatsMap
where
    I: IntoIterator<Item = (D, LangCode, u64)>,
    D: AsRef<str>,
{
    let mut acc = StatsAccumulator::new();
    for (domain, lang, bytes) in docs {
        acc.add(domain.as_ref(), lang, bytes);
    }
    acc.finish()
}

/// Ranking order: ratio desc, then en+ja bytes desc, then domain name asc.
pub fn rank_order(a: &DomainLangStats, b: &DomainLangStats) -> Ordering {
    b.ratio
        .total_cmp(&a.ratio)
        .then_with(|| (b.bytes_en() + b.bytes_ja()).cmp(&(a.bytes_en() + a.bytes_ja())))
        .then_with(|| a.domain.cmp(&b.domain))
}

/// Top `k` domains by language balance; domains with ratio 0 are never candidates.
pub fn rank_domains(stats: &DomainStatsMap, k: usize) -> Vec<String> {
    let mut candidates: Vec<&DomainLangStats> = stats.values().filter(|s| s.ratio > 0.0).collect();
    if k == 0 {
        return Vec::new();
    }
    if candidates.len() > k {
        candidates.select_nth_unstable_by(k - 1, |a, b| rank_order(a, b));
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(|a, b| rank_order(a, b));
    candidates.into_iter().map(|s| s.domain.clone()).collect()
}

/// Writes `domain, bytes_en, bytes_ja, bytes_other, ratio` rows in ranking order
/// (ratio-0 domains last). No header; ratio with 6 decimals.
pub fn write_stats_report<W: Write>(stats: &DomainStatsMap, mut sink: W) -> io::Result<()> {
    let mut rows: Vec<&DomainLangStats> = stats.values().collect();
    rows.sort_by(|a, b| rank_order(a, b));
    for s in rows {
        writeln!(
            sink,
            "{}\t{}\t{}\t{}\t{:.6}",
            s.domain,
            s.bytes_en(),
            s.bytes_ja(),
            s.bytes_other(),
            s.ratio
        )?;
    }
    sink.flush()
}

/// Reads a report back into stats; `other` bytes are stored under the `other` code.
pub fn read_stats_report<R: BufRead>(source: R) -> io::Result<DomainStatsMap> {
    let mut acc = StatsAccumulator::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = || io::Error::new(io::ErrorKind::InvalidData, format!("stats report line {}: malformed", i + 1));
        if cols.len() != 5 {
            return Err(bad());
        }
        for (lang, col) in [(LangCode::en(), 1), (LangCode::ja(), 2), (LangCode::other(), 3)] {
            let bytes: u64 = cols[col].parse().map_err(|_| bad())?;
            acc.add(cols[0], lang, bytes);
        }
    }
    Ok(acc.finish())
}

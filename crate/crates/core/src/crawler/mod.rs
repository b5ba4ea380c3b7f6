//! Budgeted, polite, same-host breadth-first crawling.

mod fetch;
mod robots;

pub use fetch::{DirectoryFetcher, FetchError, FetchResponse, Fetcher, HttpFetcher, DEFAULT_TIMEOUT, DEFAULT_USER_AGENT};
pub use robots::RobotsRules;

use std::collections::{HashSet, VecDeque};
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::Path;
use std::time::{Duration, Instant};

use url::Url;

use crate::corpus::{is_html_content_type, RawDocument};
use crate::extract::{charset_from_content_type, extract_links};
use crate::warc::WarcWriter;

/// Extensions never requested: only HTML pages are crawled.
const SKIPPED_EXTENSIONS: &[&str] = &[
    "pdf", "jpg", "jpeg", "png", "gif", "webp", "svg", "ico", "css", "js", "json", "xml", "zip", "gz",
    "tgz", "tar", "rar", "7z", "exe", "dmg", "mp3", "mp4", "avi", "mov", "wav", "doc", "docx", "xls",
    "xlsx", "ppt", "pptx", "woff", "woff2", "ttf", "eot",
];

#[derive(Clone, Debug, PartialEq)]
pub struct CrawlBudget {
    pub max_duration: Duration,
    pub max_pages: Option<usize>,
    pub politeness_delay: Duration,
    pub max_depth: usize,
}

impl Default for CrawlBudget {
    fn default() -> Self {
        CrawlBudget {
            max_duration: Duration::from_secs(86_400),
            max_pages: None,
            politeness_delay: Duration::from_secs(1),
            max_depth: 10,
        }
    }
}

impl CrawlBudget {
    pub fn validate(&self) -> Result<(), CrawlError> {
        let bad = |what: &str| Err(CrawlError::InvalidBudget(what.to_owned()));
        if self.max_duration.is_zero() {
            return bad("max_duration must be positive");
        }
        if self.politeness_delay.is_zero() {
            return bad("politeness_delay must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be positive");
        }
        if self.max_pages == Some(0) {
            return bad("max_pages must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Time,
    Pages,
    FrontierEmpty,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Time => "time",
            StopReason::Pages => "pages",
            StopReason::FrontierEmpty => "frontier_empty",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrawlSummary {
    pub pages: usize,
    pub bytes: u64,
    pub requests: usize,
    pub failures: usize,
    pub stopped_reason: StopReason,
}

#[derive(Debug, thiserror::Error)]
pub enum CrawlError {
    #[error("invalid seed URL {0:?}")]
    BadSeed(String),
    #[error("seed {url} unreachable: {reason}")]
    SeedUnreachable { url: String, reason: String },
    #[error("invalid crawl budget: {0}")]
    InvalidBudget(String),
}

/// URL identity for deduplication: no fragment, lowercase host (the parser
/// already lowercases hosts and drops default ports).
pub fn normalize_url(url: &Url) -> Url {
    let mut u = url.clone();
    u.set_fragment(None);
    u
}

fn same_site(a: &Url, b: &Url) -> bool {
    a.host_str().map(str::to_ascii_lowercase) == b.host_str().map(str::to_ascii_lowercase)
        && a.port_or_known_default() == b.port_or_known_default()
}

fn looks_like_html(url: &Url) -> bool {
    let last = url.path_segments().and_then(|mut s| s.next_back()).unwrap_or("");
    match last.rsplit_once('.') {
        Some((_, ext)) => !SKIPPED_EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()),
        None => true,
    }
}

fn path_and_query(url: &Url) -> String {
    match url.query() {
        Some(q) => format!("{}?{}", url.path(), q),
        None => url.path().to_owned(),
    }
}

/// Enforces the per-host gap between requests and the wall-clock deadline.
struct Pacer {
    deadline: Instant,
    delay: Duration,
    last: Option<Instant>,
}

impl Pacer {
    /// Waits for the host to become available; `false` if that would pass the deadline.
    fn wait_turn(&mut self) -> bool {
        let now = Instant::now();
        let ready = self.last.map_or(now, |t| (t + self.delay).max(now));
        if ready >= self.deadline {
            return false;
        }
        if ready > now {
            std::thread::sleep(ready - now);
        }
        self.last = Some(Instant::now());
        true
    }
}

/// Crawls the seed's host breadth-first, passing each HTML page to `sink`.
///
/// robots.txt is fetched first; its disallow rules are honored and its
/// crawl-delay replaces `politeness_delay` when larger. Failed fetches after
/// the seed are logged and skipped.
pub fn crawl_domain<F, S>(seed_url: &str, budget: &CrawlBudget, fetcher: &F, user_agent: &str, mut sink: S) -> Result<CrawlSummary, CrawlError>
where
    F: Fetcher + ?Sized,
    S: FnMut(RawDocument),
{
    budget.validate()?;
    let seed = Url::parse(seed_url)
        .ok()
        .filter(|u| u.host_str().is_some() && matches!(u.scheme(), "http" | "https"))
        .ok_or_else(|| CrawlError::BadSeed(seed_url.to_owned()))?;
    let seed = normalize_url(&seed);
    let mut pacer = Pacer {
        deadline: Instant::now() + budget.max_duration,
        delay: budget.politeness_delay,
        last: None,
    };
    let mut summary = CrawlSummary { pages: 0, bytes: 0, requests: 0, failures: 0, stopped_reason: StopReason::FrontierEmpty };

    let robots = match seed.join("/robots.txt") {
        Ok(robots_url) if pacer.wait_turn() => {
            summary.requests += 1;
            match fetcher.fetch(&robots_url) {
                Ok(r) if r.status == 200 => RobotsRules::parse(&String::from_utf8_lossy(&r.body), user_agent),
                _ => RobotsRules::allow_all(),
            }
        }
        _ => RobotsRules::allow_all(),
    };
    if let Some(d) = robots.crawl_delay() {
        pacer.delay = pacer.delay.max(d);
    }

    let mut seen: HashSet<Url> = HashSet::from([seed.clone()]);
    let mut frontier: VecDeque<(Url, usize)> = VecDeque::from([(seed.clone(), 0)]);
    while let Some((url, depth)) = frontier.pop_front() {
        if !robots.is_allowed(&path_and_query(&url)) {
            continue;
        }
        if !pacer.wait_turn() {
            summary.stopped_reason = StopReason::Time;
            return Ok(summary);
        }
        summary.requests += 1;
        let is_seed = url == seed;
        let resp = match fetcher.fetch(&url) {
            Ok(r) if (200..300).contains(&r.status) => r,
            Ok(r) => {
                if is_seed {
                    return Err(CrawlError::SeedUnreachable { url: url.to_string(), reason: format!("HTTP {}", r.status) });
                }
                log::debug!("skipping {url}: HTTP {}", r.status);
                summary.failures += 1;
                continue;
            }
            Err(e) => {
                if is_seed {
                    return Err(CrawlError::SeedUnreachable { url: url.to_string(), reason: e.to_string() });
                }
                log::warn!("{e}");
                summary.failures += 1;
                continue;
            }
        };
        if !is_html_content_type(&resp.content_type) {
            continue;
        }
        if depth < budget.max_depth {
            let charset = charset_from_content_type(&resp.content_type);
            for href in extract_links(&resp.body, charset) {
                let Ok(link) = url.join(&href) else { continue };
                if !matches!(link.scheme(), "http" | "https") || !same_site(&link, &seed) || !looks_like_html(&link) {
                    continue;
                }
                let link = normalize_url(&link);
                if seen.insert(link.clone()) {
                    frontier.push_back((link, depth + 1));
                }
            }
        }
        summary.pages += 1;
        summary.bytes += resp.body.len() as u64;
        let doc = RawDocument::new(url.as_str(), fetcher.fetched_at(), resp.content_type, resp.body)
            .expect("crawled URLs are absolute with a host");
        sink(doc);
        if budget.max_pages.is_some_and(|m| summary.pages >= m) {
            summary.stopped_reason = StopReason::Pages;
            return Ok(summary);
        }
    }
    Ok(summary)
}

/// Writes documents to a per-record gzip WARC file.
pub fn write_archive<I>(docs: I, path: impl AsRef<Path>) -> io::Result<usize>
where
    I: IntoIterator<Item = RawDocument>,
{
    let mut writer = WarcWriter::new(BufWriter::new(File::create(path)?))?;
    let mut n = 0;
    for doc in docs {
        writer.write_document(&doc)?;
        n += 1;
    }
    writer.finish()?;
    Ok(n)
}

//! Reading crawl output (WARC files or directories of HTML) and the
//! minimum-size domain filter.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use crate::corpus::{is_html_content_type, RawDocument};
use crate::warc::{parse_http_response, parse_warc_date, WarcReader};

/// Binary megabyte; domains with smaller compressed archives are dropped.
pub const DEFAULT_MIN_DOMAIN_BYTES: u64 = 1 << 20;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// What happened to every record seen while reading an archive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub documents: usize,
    pub skipped_non_response: usize,
    pub skipped_status: usize,
    pub skipped_content_type: usize,
    pub skipped_bad_url: usize,
    pub corrupt: usize,
}

impl IngestReport {
    pub fn absorb(&mut self, other: &IngestReport) {
        self.documents += other.documents;
        self.skipped_non_response += other.skipped_non_response;
        self.skipped_status += other.skipped_status;
        self.skipped_content_type += other.skipped_content_type;
        self.skipped_bad_url += other.skipped_bad_url;
        self.corrupt += other.corrupt;
    }
}

enum Source {
    Warc(WarcReader<BufReader<File>>),
    Dir { root: PathBuf, files: std::vec::IntoIter<PathBuf> },
}

/// Stream of HTML documents from one archive path.
pub struct ArchiveDocuments {
    source: Source,
    report: IngestReport,
}

/// Opens a WARC (plain or gzip) file or a directory of `.html` files.
///
/// In directory mode the first path component is the host
/// (`root/example.com/en/a.html` → `http://example.com/en/a.html`); files
/// directly under the root get host `localhost`.
pub fn read_archive(path: impl AsRef<Path>) -> Result<ArchiveDocuments, IngestError> {
    let path = path.as_ref();
    let io_err = |source| IngestError::Io { path: path.to_owned(), source };
    let meta = std::fs::metadata(path).map_err(io_err)?;
    let source = if meta.is_dir() {
        let mut files = Vec::new();
        for entry in walkdir::WalkDir::new(path).sort_by_file_name() {
            let entry = entry.map_err(|e| io_err(e.into()))?;
            let is_html = entry
                .path()
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "html" | "htm" | "xhtml"));
            if entry.file_type().is_file() && is_html {
                files.push(entry.into_path());
            }
        }
        Source::Dir { root: path.to_owned(), files: files.into_iter() }
    } else {
        let file = File::open(path).map_err(io_err)?;
        Source::Warc(WarcReader::new(BufReader::new(file)).map_err(io_err)?)
    };
    Ok(ArchiveDocuments { source, report: IngestReport::default() })
}

impl ArchiveDocuments {
    /// Counts so far; complete once the iterator is exhausted.
    pub fn report(&self) -> IngestReport {
        let mut r = self.report.clone();
        if let Source::Warc(reader) = &self.source {
            r.corrupt = reader.corrupt_records();
        }
        r
    }

    /// I/O error that cut reading short, if any.
    pub fn take_error(&mut self) -> Option<io::Error> {
        match &mut self.source {
            Source::Warc(r) => r.take_error(),
            Source::Dir { .. } => None,
        }
    }

    fn next_warc(&mut self) -> Option<RawDocument> {
        let Source::Warc(reader) = &mut self.source else { unreachable!() };
        for rec in reader.by_ref() {
            if rec.record_type() != Some("response") {
                self.report.skipped_non_response += 1;
                continue;
            }
            let Some(resp) = parse_http_response(&rec.block) else {
                self.report.corrupt += 1;
                continue;
            };
            if resp.status != 200 {
                self.report.skipped_status += 1;
                continue;
            }
            let content_type = resp.header("Content-Type").unwrap_or("").to_owned();
            if !is_html_content_type(&content_type) {
                self.report.skipped_content_type += 1;
                continue;
            }
            let fetched_at = parse_warc_date(rec.header("WARC-Date"));
            let url = rec.header("WARC-Target-URI").unwrap_or("").trim_matches(['<', '>']);
            match RawDocument::new(url, fetched_at, content_type, resp.body) {
                Ok(doc) => {
                    self.report.documents += 1;
                    return Some(doc);
                }
                Err(_) => self.report.skipped_bad_url += 1,
            }
        }
        None
    }

    fn next_file(&mut self) -> Option<RawDocument> {
        let Source::Dir { root, files } = &mut self.source else { unreachable!() };
        for file in files.by_ref() {
            let Some(url) = file_url(root, &file) else {
                self.report.skipped_bad_url += 1;
                continue;
            };
            let Ok(body) = std::fs::read(&file) else {
                self.report.corrupt += 1;
                continue;
            };
            let fetched_at: DateTime<Utc> = std::fs::metadata(&file)
                .and_then(|m| m.modified())
                .map(DateTime::<Utc>::from)
                .unwrap_or(DateTime::<Utc>::UNIX_EPOCH);
            if let Ok(doc) = RawDocument::new(&url, fetched_at, "text/html", body) {
                self.report.documents += 1;
                return Some(doc);
            }
            self.report.skipped_bad_url += 1;
        }
        None
    }
}

fn file_url(root: &Path, file: &Path) -> Option<String> {
    let rel = file.strip_prefix(root).ok()?;
    let parts: Vec<&str> = rel.iter().map(|c| c.to_str()).collect::<Option<_>>()?;
    let (host, rest) = match parts.as_slice() {
        [only] => ("localhost", vec![*only]),
        [host, rest @ ..] => (*host, rest.to_vec()),
        [] => return None,
    };
    let mut url = url::Url::parse(&format!("http://{host}/")).ok()?;
    url.path_segments_mut().ok()?.pop_if_empty().extend(rest);
    Some(url.to_string())
}

impl Iterator for ArchiveDocuments {
    type Item = RawDocument;

    fn next(&mut self) -> Option<RawDocument> {
        match self.source {
            Source::Warc(_) => self.next_warc(),
            Source::Dir { .. } => self.next_file(),
        }
    }
}

/// Domains whose compressed archive size is at least `min_bytes`.
pub fn filter_small_domains(domain_archives: &BTreeMap<String, u64>, min_bytes: u64) -> BTreeSet<String> {
    domain_archives
        .iter()
        .filter(|(_, size)| **size >= min_bytes)
        .map(|(d, _)| d.clone())
        .collect()
}

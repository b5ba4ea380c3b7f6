//! Work-directory artifacts: names, atomic writes and line-delimited records.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub const DOMAIN_STATS: &str = "domain_stats.tsv";
pub const DOMAINS: &str = "domains.txt";
pub const ARCHIVES_DIR: &str = "archives";
pub const CRAWL_REPORT: &str = "crawl_report.tsv";
pub const INGEST_REPORT: &str = "ingest_report.tsv";
pub const KEPT_DOMAINS: &str = "kept_domains.txt";
pub const DOCUMENTS: &str = "documents.jsonl";
pub const DOC_PAIRS: &str = "docpairs.jsonl";
pub const RAW_CORPUS: &str = "corpus.raw.tsv";
pub const FILTER_MODEL: &str = "filter.model";
pub const FILTERED_CORPUS: &str = "corpus.filtered.tsv";
pub const REJECT_REPORT: &str = "reject_report.tsv";
pub const CORPUS_STATS: &str = "corpus_stats.tsv";

pub fn archive_path(work: &Path, domain: &str) -> PathBuf {
    work.join(ARCHIVES_DIR).join(format!("{domain}.warc.gz"))
}

/// Writes through a temporary file in the target directory and renames it into
/// place, so a crash never leaves a truncated artifact under `path`.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<&mut File>) -> std::io::Result<()>,
{
    let io_err = |e| CliError::Io { path: path.to_owned(), source: e };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644)).map_err(io_err)?;
    }
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::from_io(path, e))
}

pub fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| CliError::from_io(path, e))?;
        let line = line.trim();
        if !line.is_empty() {
            out.push(line.to_owned());
        }
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CliError> {
    write_atomic(path, |w| {
        for r in records {
            serde_json::to_writer(&mut *w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::from_io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| CliError::Invalid(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

//! Corpus exchange format: one pair per LF-terminated line,
//! `src_url \t tgt_url \t src_text \t tgt_text \t align_score \t filter_score`.

use std::io::{self, BufRead, Write};

use super::SentencePair;

const COLUMNS: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("failed writing pair {index}: {source}")]
    Write { index: usize, source: io::Error },
    #[error("read error at line {line}: {source}")]
    Read { line: usize, source: io::Error },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Replaces tabs, CR and LF with single spaces so a field cannot break the layout.
pub fn sanitize_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains(['\t', '\n', '\r']) {
        s.chars()
            .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
            .collect::<String>()
            .into()
    } else {
        s.into()
    }
}

/// Writes `pairs` and returns the number of bytes written.
pub fn serialize_pairs<W: Write>(pairs: &[SentencePair], mut sink: W) -> Result<u64, CorpusError> {
    let mut written = 0u64;
    let mut line = String::new();
    for (index, p) in pairs.iter().enumerate() {
        line.clear();
        for field in [&p.src_url, &p.tgt_url, &p.src_text, &p.tgt_text] {
            line.push_str(&sanitize_field(field));
            line.push('\t');
        }
        line.push_str(&format!("{:.6}\t{:.6}\n", p.align_score, p.filter_score));
        sink.write_all(line.as_bytes())
            .map_err(|source| CorpusError::Write { index, source })?;
        written += line.len() as u64;
    }
    sink.flush().map_err(|source| CorpusError::Write {
        index: pairs.len(),
        source,
    })?;
    Ok(written)
}

fn parse_score(field: &str, line: usize, name: &str) -> Result<f64, CorpusError> {
    let v: f64 = field.parse().map_err(|_| CorpusError::Format {
        line,
        message: format!("unparsable {name} {field:?}"),
    })?;
    if !(0.0..=1.0).contains(&v) {
        return Err(CorpusError::Format {
            line,
            message: format!("{name} {v} outside [0, 1]"),
        });
    }
    Ok(v)
}

/// Reads a corpus written by [`serialize_pairs`]. Line numbers in errors are 1-based.
pub fn parse_pairs<R: BufRead>(source: R) -> Result<Vec<SentencePair>, CorpusError> {
    let mut pairs = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| CorpusError::Read { line: lineno, source })?;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(CorpusError::Format {
                line: lineno,
                message: format!("expected {COLUMNS} columns, found {}", cols.len()),
            });
        }
        if cols[2].is_empty() || cols[3].is_empty() {
            return Err(CorpusError::Format {
                line: lineno,
                message: "empty sentence text".into(),
            });
        }
        pairs.push(SentencePair {
            src_url: cols[0].to_owned(),
            tgt_url: cols[1].to_owned(),
            src_text: cols[2].to_owned(),
            tgt_text: cols[3].to_owned(),
            align_score: parse_score(cols[4], lineno, "align_score")?,
            filter_score: parse_score(cols[5], lineno, "filter_score")?,
        });
    }
    Ok(pairs)
}

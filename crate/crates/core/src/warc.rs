//! WARC 1.0 records: writing per-record gzip archives and lenient reading of
//! plain or gzipped archives with corrupt-record recovery.

use std::io::{self, BufRead, Read, Seek, SeekFrom, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use flate2::bufread::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use uuid::Uuid;

use crate::corpus::RawDocument;

const GZIP_MAGIC: [u8; 3] = [0x1f, 0x8b, 0x08];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WarcRecord {
    pub version: String,
    pub headers: Vec<(String, String)>,
    pub block: Vec<u8>,
}

impl WarcRecord {
    /// Case-insensitive header lookup.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn record_type(&self) -> Option<&str> {
        self.header("WARC-Type")
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.block.len() + 512);
        out.extend_from_slice(self.version.as_bytes());
        out.extend_from_slice(b"\r\n");
        for (k, v) in &self.headers {
            out.extend_from_slice(format!("{k}: {v}\r\n").as_bytes());
        }
        out.extend_from_slice(format!("Content-Length: {}\r\n\r\n", self.block.len()).as_bytes());
        out.extend_from_slice(&self.block);
        out.extend_from_slice(b"\r\n\r\n");
        out
    }
}

fn warc_date(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Serializes a document as an HTTP/1.1 200 response block.
pub fn http_response_block(doc: &RawDocument) -> Vec<u8> {
    let mut block = format!(
        "HTTP/1.1 200 OK\r\nContent-Type: {}\r\nContent-Length: {}\r\n\r\n",
        doc.content_type,
        doc.body.len()
    )
    .into_bytes();
    block.extend_from_slice(&doc.body);
    block
}

/// Writes one gzip member per record.
pub struct WarcWriter<W: Write> {
    inner: W,
    records: usize,
}

impl<W: Write> WarcWriter<W> {
    /// Starts an archive with a `warcinfo` record.
    pub fn new(inner: W) -> io::Result<Self> {
        let mut w = WarcWriter { inner, records: 0 };
        let info = WarcRecord {
            version: "WARC/1.0".into(),
            headers: vec![
                ("WARC-Type".into(), "warcinfo".into()),
                ("WARC-Record-ID".into(), format!("<urn:uuid:{}>", Uuid::new_v5(&Uuid::NAMESPACE_URL, b"paramine-warcinfo"))),
                ("Content-Type".into(), "application/warc-fields".into()),
            ],
            block: format!("software: paramine/{}\r\nformat: WARC File Format 1.0\r\n", env!("CARGO_PKG_VERSION"))
                .into_bytes(),
        };
        w.write_record(&info)?;
        Ok(w)
    }

    pub fn write_record(&mut self, record: &WarcRecord) -> io::Result<()> {
        let mut enc = GzEncoder::new(&mut self.inner, Compression::default());
        enc.write_all(&record.to_bytes())?;
        enc.finish()?;
        self.records += 1;
        Ok(())
    }

    pub fn write_document(&mut self, doc: &RawDocument) -> io::Result<()> {
        let date = warc_date(&doc.fetched_at);
        let id = Uuid::new_v5(&Uuid::NAMESPACE_URL, format!("{}#{}#{}", doc.url, date, self.records).as_bytes());
        let record = WarcRecord {
            version: "WARC/1.0".into(),
            headers: vec![
                ("WARC-Type".into(), "response".into()),
                ("WARC-Record-ID".into(), format!("<urn:uuid:{id}>")),
                ("WARC-Date".into(), date),
                ("WARC-Target-URI".into(), doc.url.clone()),
                ("Content-Type".into(), "application/http; msgtype=response".into()),
            ],
            block: http_response_block(doc),
        };
        self.write_record(&record)
    }

    /// Records written so far, including the leading `warcinfo`.
    pub fn records(&self) -> usize {
        self.records
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

#[derive(Debug)]
enum ParseError {
    Io(io::Error),
    Corrupt(String),
}

impl From<io::Error> for ParseError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            ParseError::Corrupt("truncated record".into())
        } else {
            ParseError::Io(e)
        }
    }
}

fn trim_eol(line: &str) -> &str {
    line.trim_end_matches(['\r', '\n'])
}

/// Reads one record. `first_line` is a version line already consumed during resync.
fn parse_record<R: BufRead>(r: &mut R, first_line: Option<String>) -> Result<Option<WarcRecord>, ParseError> {
    let version = match first_line {
        Some(l) => l,
        None => loop {
            let mut line = String::new();
            if r.read_line(&mut line).map_err(|e| match e.kind() {
                io::ErrorKind::InvalidData => ParseError::Corrupt("non-UTF-8 header line".into()),
                _ => ParseError::Io(e),
            })? == 0
            {
                return Ok(None);
            }
            if !trim_eol(&line).is_empty() {
                break trim_eol(&line).to_owned();
            }
        },
    };
    if !version.starts_with("WARC/") {
        return Err(ParseError::Corrupt(format!("bad version line {version:?}")));
    }
    let mut headers: Vec<(String, String)> = Vec::new();
    loop {
        let mut line = String::new();
        if r.read_line(&mut line)
            .map_err(|_| ParseError::Corrupt("unreadable header".into()))?
            == 0
        {
            return Err(ParseError::Corrupt("eof in headers".into()));
        }
        let line = trim_eol(&line);
        if line.is_empty() {
            break;
        }
        if line.starts_with([' ', '\t']) {
            if let Some((_, v)) = headers.last_mut() {
                v.push(' ');
                v.push_str(line.trim());
            }
            continue;
        }
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| ParseError::Corrupt(format!("bad header line {line:?}")))?;
        headers.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    let len_pos = headers
        .iter()
        .position(|(k, _)| k.eq_ignore_ascii_case("Content-Length"))
        .ok_or_else(|| ParseError::Corrupt("missing Content-Length".into()))?;
    let (_, len) = headers.remove(len_pos);
    let len: usize = len
        .parse()
        .map_err(|_| ParseError::Corrupt(format!("bad Content-Length {len:?}")))?;
    let mut block = vec![0u8; len];
    r.read_exact(&mut block)?;
    Ok(Some(WarcRecord { version, headers, block }))
}

/// Streams records from a plain or per-record-gzip WARC file.
///
/// Corrupt records are skipped and counted; the reader resynchronizes on the
/// next gzip member (or next `WARC/` line for plain archives).
pub struct WarcReader<R: BufRead + Seek> {
    inner: R,
    gzip: bool,
    pending: std::collections::VecDeque<WarcRecord>,
    resync_line: Option<String>,
    corrupt: usize,
    done: bool,
    error: Option<io::Error>,
}

impl<R: BufRead + Seek> WarcReader<R> {
    pub fn new(mut inner: R) -> io::Result<Self> {
        let gzip = inner.fill_buf()?.starts_with(&GZIP_MAGIC[..2]);
        Ok(WarcReader {
            inner,
            gzip,
            pending: Default::default(),
            resync_line: None,
            corrupt: 0,
            done: false,
            error: None,
        })
    }

    pub fn corrupt_records(&self) -> usize {
        self.corrupt
    }

    /// I/O error that ended reading early, if any.
    pub fn take_error(&mut self) -> Option<io::Error> {
        self.error.take()
    }

    fn fail(&mut self, e: io::Error) {
        self.error = Some(e);
        self.done = true;
    }

    /// Seeks to the next gzip magic at or after `from`.
    fn seek_to_magic(&mut self, from: u64) -> io::Result<bool> {
        self.inner.seek(SeekFrom::Start(from))?;
        let mut window: Vec<u8> = Vec::with_capacity(3);
        let mut pos = from;
        loop {
            let buf = self.inner.fill_buf()?;
            if buf.is_empty() {
                return Ok(false);
            }
            let mut scan = window.clone();
            scan.extend_from_slice(buf);
            if let Some(p) = scan.windows(3).position(|w| w == GZIP_MAGIC) {
                let target = pos - window.len() as u64 + p as u64;
                self.inner.seek(SeekFrom::Start(target))?;
                return Ok(true);
            }
            let n = buf.len();
            pos += n as u64;
            window = scan[scan.len().saturating_sub(2)..].to_vec();
            self.inner.consume(n);
        }
    }

    fn next_gzip_member(&mut self) -> io::Result<()> {
        let start = self.inner.stream_position()?;
        if self.inner.fill_buf()?.is_empty() {
            self.done = true;
            return Ok(());
        }
        let mut data = Vec::new();
        let result = GzDecoder::new(&mut self.inner).read_to_end(&mut data);
        if result.is_err() {
            self.corrupt += 1;
            if !self.seek_to_magic(start + 1)? {
                self.done = true;
            }
            return Ok(());
        }
        let mut cursor = &data[..];
        loop {
            match parse_record(&mut cursor, None) {
                Ok(Some(rec)) => self.pending.push_back(rec),
                Ok(None) => break,
                Err(_) => {
                    self.corrupt += 1;
                    break;
                }
            }
        }
        Ok(())
    }

    fn next_plain(&mut self) -> io::Result<()> {
        match parse_record(&mut self.inner, self.resync_line.take()) {
            Ok(Some(rec)) => self.pending.push_back(rec),
            Ok(None) => self.done = true,
            Err(ParseError::Io(e)) => return Err(e),
            Err(ParseError::Corrupt(reason)) => {
                log::debug!("skipping corrupt WARC record: {reason}");
                self.corrupt += 1;
                loop {
                    let mut buf = Vec::new();
                    if self.inner.read_until(b'\n', &mut buf)? == 0 {
                        self.done = true;
                        break;
                    }
                    if buf.starts_with(b"WARC/1.") {
                        self.resync_line = Some(trim_eol(&String::from_utf8_lossy(&buf)).to_owned());
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<R: BufRead + Seek> Iterator for WarcReader<R> {
    type Item = WarcRecord;

    fn next(&mut self) -> Option<WarcRecord> {
        loop {
            if let Some(rec) = self.pending.pop_front() {
                return Some(rec);
            }
            if self.done {
                return None;
            }
            let step = if self.gzip { self.next_gzip_member() } else { self.next_plain() };
            if let Err(e) = step {
                self.fail(e);
            }
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

fn dechunk(mut data: &[u8]) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    loop {
        let eol = data.windows(2).position(|w| w == b"\r\n")?;
        let size_field = std::str::from_utf8(&data[..eol]).ok()?;
        let size = usize::from_str_radix(size_field.split(';').next()?.trim(), 16).ok()?;
        data = &data[eol + 2..];
        if size == 0 {
            return Some(out);
        }
        out.extend_from_slice(data.get(..size)?);
        data = data.get(size + 2..).unwrap_or(&[]);
    }
}

/// Parses an HTTP response block, undoing chunked transfer and gzip/deflate encodings.
pub fn parse_http_response(block: &[u8]) -> Option<HttpResponse> {
    let (head_end, sep) = match block.windows(4).position(|w| w == b"\r\n\r\n") {
        Some(p) => (p, 4),
        None => (block.windows(2).position(|w| w == b"\n\n")?, 2),
    };
    let head = std::str::from_utf8(&block[..head_end]).ok()?;
    let mut lines = head.lines();
    let status_line = lines.next()?;
    let mut parts = status_line.split_whitespace();
    if !parts.next()?.starts_with("HTTP/") {
        return None;
    }
    let status: u16 = parts.next()?.parse().ok()?;
    let headers: Vec<(String, String)> = lines
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect();
    let mut resp = HttpResponse {
        status,
        headers,
        body: block[head_end + sep..].to_vec(),
    };
    if resp.header("Transfer-Encoding").is_some_and(|v| v.eq_ignore_ascii_case("chunked")) {
        resp.body = dechunk(&resp.body)?;
    }
    match resp.header("Content-Encoding").map(str::to_ascii_lowercase).as_deref() {
        Some("gzip" | "x-gzip") => {
            let mut out = Vec::new();
            flate2::read::MultiGzDecoder::new(&resp.body[..]).read_to_end(&mut out).ok()?;
            resp.body = out;
        }
        Some("deflate") => {
            let mut out = Vec::new();
            flate2::read::ZlibDecoder::new(&resp.body[..]).read_to_end(&mut out).ok()?;
            resp.body = out;
        }
        _ => {}
    }
    Some(resp)
}

/// Parses `WARC-Date`, falling back to the epoch for malformed values.
pub fn parse_warc_date(s: Option<&str>) -> DateTime<Utc> {
    s.and_then(|s| DateTime::parse_from_rfc3339(s).ok())
        .map(|d| d.with_timezone(&Utc))
        .unwrap_or(DateTime::<Utc>::UNIX_EPOCH)
}

//! Page fetching: the injectable interface, a real HTTP client and a
//! directory-backed fixture fetcher.

use std::path::PathBuf;
use std::time::Duration;

use chrono::{DateTime, Utc};
use url::Url;

pub const DEFAULT_USER_AGENT: &str = concat!("paramine/", env!("CARGO_PKG_VERSION"));
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
const MAX_BODY_BYTES: u64 = 32 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchResponse {
    pub status: u16,
    pub content_type: String,
    pub body: Vec<u8>,
}

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("request to {url} failed: {message}")]
    Transport { url: String, message: String },
}

pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &Url) -> Result<FetchResponse, FetchError>;

    /// Upper bound on one request's duration.
    fn timeout(&self) -> Duration {
        DEFAULT_TIMEOUT
    }

    /// Timestamp stored with a page fetched just now.
    fn fetched_at(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// HTTP/1.1 client with a fixed User-Agent and global request timeout.
pub struct HttpFetcher {
    agent: ureq::Agent,
    timeout: Duration,
}

impl HttpFetcher {
    pub fn new(user_agent: &str, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .user_agent(user_agent)
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .max_redirects(5)
            .build()
            .into();
        HttpFetcher { agent, timeout }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new(DEFAULT_USER_AGENT, DEFAULT_TIMEOUT)
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &Url) -> Result<FetchResponse, FetchError> {
        let err = |e: ureq::Error| FetchError::Transport { url: url.to_string(), message: e.to_string() };
        let mut resp = self.agent.get(url.as_str()).call().map_err(err)?;
        let status = resp.status().as_u16();
        let content_type = resp
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .unwrap_or("")
            .to_owned();
        let body = resp.body_mut().with_config().limit(MAX_BODY_BYTES).read_to_vec().map_err(err)?;
        Ok(FetchResponse { status, content_type, body })
    }

    fn timeout(&self) -> Duration {
        self.timeout
    }
}

/// Serves `root/<host>/<path>` for any URL; `/` and directory paths map to `index.html`.
///
/// Pages are stamped with a fixed time (the Unix epoch unless set), so
/// archives built from the same tree are byte-identical.
#[derive(Clone, Debug)]
pub struct DirectoryFetcher {
    root: PathBuf,
    fetched_at: DateTime<Utc>,
}

impl DirectoryFetcher {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirectoryFetcher { root: root.into(), fetched_at: DateTime::UNIX_EPOCH }
    }

    pub fn with_fetch_time(mut self, t: DateTime<Utc>) -> Self {
        self.fetched_at = t;
        self
    }
}

fn content_type_for(path: &std::path::Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("html" | "htm") => "text/html; charset=utf-8",
        Some("txt") => "text/plain",
        Some("pdf") => "application/pdf",
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        _ => "application/octet-stream",
    }
}

impl Fetcher for DirectoryFetcher {
    fn fetched_at(&self) -> DateTime<Utc> {
        self.fetched_at
    }

    fn fetch(&self, url: &Url) -> Result<FetchResponse, FetchError> {
        let Some(host) = url.host_str() else {
            return Err(FetchError::Transport { url: url.to_string(), message: "no host".into() });
        };
        let mut path = self.root.join(host);
        if let Some(segments) = url.path_segments() {
            for seg in segments {
                let seg = percent_decode(seg);
                if seg == ".." || seg.contains(['/', '\\']) {
                    return Ok(not_found());
                }
                if !seg.is_empty() {
                    path.push(seg);
                }
            }
        }
        if url.path().ends_with('/') || path.is_dir() {
            path.push("index.html");
        }
        match std::fs::read(&path) {
            Ok(body) => Ok(FetchResponse { status: 200, content_type: content_type_for(&path).into(), body }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(not_found()),
            Err(e) => Err(FetchError::Transport { url: url.to_string(), message: e.to_string() }),
        }
    }
}

fn not_found() -> FetchResponse {
    FetchResponse { status: 404, content_type: "text/plain".into(), body: b"not found".to_vec() }
}

fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            if let Some(b) = s.get(i + 1..i + 3).and_then(|h| u8::from_str_radix(h, 16).ok()) {
                out.push(b);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

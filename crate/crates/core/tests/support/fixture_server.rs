//! Minimal HTTP/1.1 server over a fixed page map, recording when each request arrived.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

#[derive(Clone)]
pub struct Page {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl Page {
    pub fn html(body: impl Into<String>) -> Page {
        Page { status: 200, content_type: "text/html; charset=utf-8", body: body.into().into_bytes() }
    }

    pub fn text(body: impl Into<String>) -> Page {
        Page { status: 200, content_type: "text/plain", body: body.into().into_bytes() }
    }
}

pub struct FixtureServer {
    pub port: u16,
    log: Arc<Mutex<Vec<(String, Instant)>>>,
}

impl FixtureServer {
    /// Serves `pages` (keyed by path, e.g. `/a.html`); anything else is 404.
    /// Every response is held back by `latency`.
    pub fn start(pages: HashMap<String, Page>, latency: Duration) -> FixtureServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
        let port = listener.local_addr().unwrap().port();
        let log = Arc::new(Mutex::new(Vec::new()));
        let pages = Arc::new(pages);
        let shared = Arc::clone(&log);
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let arrived = Instant::now();
                let (pages, log) = (Arc::clone(&pages), Arc::clone(&shared));
                thread::spawn(move || serve(stream, arrived, &pages, &log, latency));
            }
        });
        FixtureServer { port, log }
    }

    pub fn base(&self) -> String {
        format!("http://127.0.0.1:{}", self.port)
    }

    /// `(path, arrival)` for every request so far, in arrival order.
    pub fn requests(&self) -> Vec<(String, Instant)> {
        let mut v = self.log.lock().unwrap().clone();
        v.sort_by_key(|r| r.1);
        v
    }
}

fn serve(stream: TcpStream, arrived: Instant, pages: &HashMap<String, Page>, log: &Mutex<Vec<(String, Instant)>>, latency: Duration) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    loop {
        let mut h = String::new();
        match reader.read_line(&mut h) {
            Ok(0) | Err(_) => break,
            Ok(_) if h == "\r\n" || h == "\n" => break,
            Ok(_) => {}
        }
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_owned();
    log.lock().unwrap().push((path.clone(), arrived));
    thread::sleep(latency);
    let page = pages.get(&path).cloned().unwrap_or(Page { status: 404, content_type: "text/plain", body: b"not found".to_vec() });
    let reason = if page.status == 200 { "OK" } else { "Not Found" };
    let mut out = stream;
    let head = format!(
        "HTTP/1.1 {} {reason}\r\nContent-Type: {}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        page.status,
        page.content_type,
        page.body.len()
    );
    let _ = out.write_all(head.as_bytes());
    let _ = out.write_all(&page.body);
    let _ = out.flush();
}

/// `/` links to `/p0.html`, and page k links to page k+1, up to `n` pages.
pub fn chain_site(n: usize) -> HashMap<String, Page> {
    let mut pages = HashMap::new();
    pages.insert("/".to_owned(), Page::html("<html><body><p>Start.</p><a href=\"/p0.html\">next</a></body></html>"));
    for k in 0..n {
        let next = if k + 1 < n { format!("<a href=\"/p{}.html\">next</a>", k + 1) } else { String::new() };
        pages.insert(format!("/p{k}.html"), Page::html(format!("<html><body><p>Page {k}.</p>{next}</body></html>")));
    }
    pages
}

//! Tag-structural HTML to text conversion.

use std::borrow::Cow;

use encoding_rs::{Encoding, UTF_8};

/// Elements whose whole content is discarded.
const DROPPED: &[&str] = &["script", "style", "noscript", "head", "template", "svg"];

/// Elements that start or end a line of text.
const BLOCKS: &[&str] = &[
    "p", "div", "li", "br", "h1", "h2", "h3", "h4", "h5", "h6", "td", "th", "tr", "section",
    "article", "ul", "ol", "dl", "dt", "dd", "table", "blockquote", "pre", "hr", "header",
    "footer", "nav", "main", "aside", "form", "figure", "figcaption", "address", "title",
    "option", "body", "html",
];

/// Pulls the `charset` parameter out of a `Content-Type` header value.
pub fn charset_from_content_type(content_type: &str) -> Option<&str> {
    content_type.split(';').skip(1).find_map(|param| {
        let (k, v) = param.split_once('=')?;
        k.trim()
            .eq_ignore_ascii_case("charset")
            .then(|| v.trim().trim_matches(['"', '\'']))
    })
}

/// Scans the document prefix for `<meta charset=...>` or an http-equiv content type.
fn sniff_meta_charset(html: &[u8]) -> Option<&'static Encoding> {
    let prefix = &html[..html.len().min(4096)];
    let lower: Vec<u8> = prefix.to_ascii_lowercase();
    let needle = b"charset=";
    let mut from = 0;
    while let Some(pos) = find(&lower[from..], needle) {
        let start = from + pos + needle.len();
        let rest = &lower[start..];
        let rest = rest.strip_prefix(b"\"").or_else(|| rest.strip_prefix(b"'")).unwrap_or(rest);
        let end = rest
            .iter()
            .position(|b| matches!(b, b'"' | b'\'' | b' ' | b';' | b'>' | b'/'))
            .unwrap_or(rest.len());
        if let Some(enc) = Encoding::for_label(&rest[..end]) {
            return Some(enc);
        }
        from = start;
    }
    None
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Decodes page bytes: declared charset, then meta charset, then UTF-8 with replacement.
pub fn decode_html(html: &[u8], declared_charset: Option<&str>) -> String {
    let encoding = declared_charset
        .and_then(|label| Encoding::for_label(label.trim().as_bytes()))
        .or_else(|| sniff_meta_charset(html))
        .unwrap_or(UTF_8);
    let (text, _, _) = encoding.decode(html);
    text.into_owned()
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Text(&'a str),
    Start { name: String, attrs: Vec<(String, String)> },
    End { name: String },
}

/// Minimal lenient tokenizer. Comments, doctypes and processing
/// instructions are swallowed; `<` not starting a tag is text.
struct Tokenizer<'a> {
    src: &'a str,
    pos: usize,
    raw_text_end: Option<&'static str>,
}

impl<'a> Tokenizer<'a> {
    fn new(src: &'a str) -> Self {
        Tokenizer { src, pos: 0, raw_text_end: None }
    }

    fn find_ci(&self, from: usize, needle: &str) -> Option<usize> {
        let hay = &self.src.as_bytes()[from..];
        let n = needle.as_bytes();
        hay.windows(n.len())
            .position(|w| w.eq_ignore_ascii_case(n))
            .map(|p| from + p)
    }

    fn parse_tag(&mut self, start: usize) -> Option<Token<'a>> {
        let bytes = self.src.as_bytes();
        let mut i = start + 1;
        let closing = bytes.get(i) == Some(&b'/');
        if closing {
            i += 1;
        }
        let name_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-' || bytes[i] == b':') {
            i += 1;
        }
        let name = self.src[name_start..i].to_ascii_lowercase();
        let mut attrs = Vec::new();
        loop {
            while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'/') {
                i += 1;
            }
            if i >= bytes.len() {
                self.pos = bytes.len();
                break;
            }
            if bytes[i] == b'>' {
                self.pos = i + 1;
                break;
            }
            let key_start = i;
            while i < bytes.len() && !matches!(bytes[i], b'=' | b'>' | b'/') && !bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            let key = self.src[key_start..i].to_ascii_lowercase();
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            let mut value = String::new();
            if bytes.get(i) == Some(&b'=') {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                match bytes.get(i) {
                    Some(&q @ (b'"' | b'\'')) => {
                        let vstart = i + 1;
                        let vend = bytes[vstart..].iter().position(|&b| b == q).map_or(bytes.len(), |p| vstart + p);
                        value = self.src[vstart..vend].to_owned();
                        i = (vend + 1).min(bytes.len());
                    }
                    _ => {
                        let vstart = i;
                        while i < bytes.len() && bytes[i] != b'>' && !bytes[i].is_ascii_whitespace() {
                            i += 1;
                        }
                        value = self.src[vstart..i].to_owned();
                    }
                }
            }
            if !key.is_empty() {
                attrs.push((key, value));
            }
        }
        if closing {
            Some(Token::End { name })
        } else {
            if name == "script" {
                self.raw_text_end = Some("</script");
            } else if name == "style" {
                self.raw_text_end = Some("</style");
            }
            Some(Token::Start { name, attrs })
        }
    }
}

impl<'a> Iterator for Tokenizer<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        let bytes = self.src.as_bytes();
        if let Some(end) = self.raw_text_end.take() {
            let stop = self.find_ci(self.pos, end).unwrap_or(bytes.len());
            let text = &self.src[self.pos..stop];
            self.pos = stop;
            if !text.is_empty() {
                return Some(Token::Text(text));
            }
        }
        loop {
            if self.pos >= bytes.len() {
                return None;
            }
            let start = self.pos;
            if bytes[start] != b'<' {
                let end = bytes[start..].iter().position(|&b| b == b'<').map_or(bytes.len(), |p| start + p);
                self.pos = end;
                return Some(Token::Text(&self.src[start..end]));
            }
            let next = bytes.get(start + 1).copied();
            match next {
                Some(b'!') => {
                    if self.src[start..].starts_with("<!--") {
                        self.pos = self.find_ci(start + 4, "-->").map_or(bytes.len(), |p| p + 3);
                    } else {
                        self.pos = bytes[start..].iter().position(|&b| b == b'>').map_or(bytes.len(), |p| start + p + 1);
                    }
                }
                Some(b'?') => {
                    self.pos = bytes[start..].iter().position(|&b| b == b'>').map_or(bytes.len(), |p| start + p + 1);
                }
                Some(b) if b.is_ascii_alphabetic() => return self.parse_tag(start),
                Some(b'/') if bytes.get(start + 2).is_some_and(u8::is_ascii_alphabetic) => {
                    return self.parse_tag(start)
                }
                _ => {
                    // Literal '<'.
                    self.pos = start + 1;
                    return Some(Token::Text(&self.src[start..start + 1]));
                }
            }
        }
    }
}

#[derive(Default)]
struct LineSink {
    lines: Vec<String>,
    line: String,
    pending_space: bool,
}

impl LineSink {
    fn push_text(&mut self, text: &str) {
        let decoded: Cow<'_, str> = if text.contains('&') {
            html_escape::decode_html_entities(text)
        } else {
            text.into()
        };
        for c in decoded.chars() {
            if c.is_whitespace() {
                self.pending_space = true;
            } else if !c.is_control() {
                if self.pending_space && !self.line.is_empty() {
                    self.line.push(' ');
                }
                self.pending_space = false;
                self.line.push(c);
            }
        }
    }

    fn break_line(&mut self) {
        if !self.line.is_empty() {
            self.lines.push(std::mem::take(&mut self.line));
        }
        self.pending_space = false;
    }

    fn finish(mut self) -> String {
        self.break_line();
        self.lines.join("\n")
    }
}

/// Converts HTML bytes to plain text, one block element per line.
pub fn extract_text(html: &[u8], declared_charset: Option<&str>) -> String {
    let decoded = decode_html(html, declared_charset);
    let mut sink = LineSink::default();
    // Name of the dropped element we are inside, with its nesting depth.
    let mut skipping: Option<(String, usize)> = None;
    for token in Tokenizer::new(&decoded) {
        if let Some((name, depth)) = skipping.as_mut() {
            match &token {
                Token::Start { name: n, .. } if n == name => *depth += 1,
                Token::End { name: n } if n == name => {
                    *depth -= 1;
                    if *depth == 0 {
                        skipping = None;
                    }
                }
                // Some pages never close <head>.
                Token::Start { name: n, .. } if name == "head" && n == "body" => {
                    skipping = None;
                    sink.break_line();
                }
                _ => {}
            }
            continue;
        }
        match token {
            Token::Text(t) => sink.push_text(t),
            Token::Start { name, .. } => {
                if DROPPED.contains(&name.as_str()) {
                    skipping = Some((name, 1));
                } else if BLOCKS.contains(&name.as_str()) {
                    sink.break_line();
                }
            }
            Token::End { name } => {
                if BLOCKS.contains(&name.as_str()) {
                    sink.break_line();
                }
            }
        }
    }
    sink.finish()
}

/// `href` values of anchors and image-map areas, entity-decoded, in document order.
pub fn extract_links(html: &[u8], declared_charset: Option<&str>) -> Vec<String> {
    let decoded = decode_html(html, declared_charset);
    Tokenizer::new(&decoded)
        .filter_map(|t| match t {
            Token::Start { name, attrs } if name == "a" || name == "area" => attrs
                .into_iter()
                .find(|(k, _)| k == "href")
                .map(|(_, v)| html_escape::decode_html_entities(v.trim()).into_owned()),
            _ => None,
        })
        .filter(|href| !href.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(html: &str) -> String {
        extract_text(html.as_bytes(), None)
    }

    #[test]
    fn block_elements_break_lines() {
        assert_eq!(text("<p>Hello</p><p>World</p>"), "Hello\nWorld");
        assert_eq!(text("a<br>b<br/>c"), "a\nb\nc");
        assert_eq!(text("<ul><li>x</li><li>y</li></ul>"), "x\ny");
    }

    #[test]
    fn dropped_elements() {
        assert_eq!(text("<script>x=1</script>Hi"), "Hi");
        assert_eq!(text("<style>p{a:b}</style><noscript><p>js</p></noscript>Hi"), "Hi");
        assert_eq!(text("<script>if (a<b) { x = '</p>'; }</script>Hi"), "Hi");
        assert_eq!(text("<html><head><title>T</title></head><body><p>B</p></body></html>"), "B");
        assert_eq!(text("<head><title>T</title><body>B"), "B");
        assert_eq!(text("A<!-- <p>hidden</p> -->B"), "AB");
        assert_eq!(text("<!DOCTYPE html><?xml x?>C"), "C");
    }

    #[test]
    fn entities_and_whitespace() {
        assert_eq!(text("&amp;"), "&");
        assert_eq!(text("&lt;b&gt; &#x41;&#66;"), "<b> AB");
        assert_eq!(text("  a \n\t b   <b>c</b>  "), "a b c");
        assert_eq!(text("Hel<b>lo</b> <i>there</i>"), "Hello there");
        assert_eq!(text("a&nbsp;&nbsp;b"), "a b");
    }

    #[test]
    fn literal_angle_brackets() {
        assert_eq!(text("1 < 2 and 3 <4"), "1 < 2 and 3 <4");
    }

    #[test]
    fn attributes_with_gt_inside_quotes() {
        assert_eq!(text(r#"<a title="a>b" href='x'>link</a>"#), "link");
    }

    #[test]
    fn charset_handling() {
        let (sjis, _, _) = encoding_rs::SHIFT_JIS.encode("日本語のテキスト");
        assert_eq!(extract_text(&sjis, Some("Shift_JIS")), "日本語のテキスト");
        let mut page = br#"<meta charset="shift_jis"><p>"#.to_vec();
        page.extend_from_slice(&sjis);
        assert_eq!(extract_text(&page, None), "日本語のテキスト");
        let mut page = br#"<meta http-equiv="Content-Type" content="text/html; charset=EUC-JP">"#.to_vec();
        let (euc, _, _) = encoding_rs::EUC_JP.encode("猫");
        page.extend_from_slice(&euc);
        assert_eq!(extract_text(&page, None), "猫");
        assert_eq!(extract_text(b"ok\xff", None), "ok\u{FFFD}");
        assert_eq!(charset_from_content_type("text/html; charset=\"UTF-8\""), Some("UTF-8"));
        assert_eq!(charset_from_content_type("text/html"), None);
    }

    #[test]
    fn links() {
        let html = br#"<a href="/a">A</a><A HREF=b.html>B</A><a name=x>no</a><a href="?q=1&amp;r=2">C</a>"#;
        assert_eq!(extract_links(html, None), vec!["/a", "b.html", "?q=1&r=2"]);
    }
}

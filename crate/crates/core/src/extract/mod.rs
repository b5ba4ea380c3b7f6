//! HTML to normalized, sentence-split text.

mod html;
mod segment;

pub use html::{charset_from_content_type, decode_html, extract_links, extract_text};
pub use segment::{split_sentences, SentenceSplitter, DEFAULT_ABBREVIATIONS};

use unicode_normalization::{is_nfkc_quick, IsNormalized, UnicodeNormalization};

/// Unicode NFKC normalization.
pub fn normalize_nfkc(text: &str) -> String {
    match is_nfkc_quick(text.chars()) {
        IsNormalized::Yes => text.to_owned(),
        _ => text.nfkc().collect(),
    }
}

/// Pluggable text extraction, so a content-density extractor can replace the structural one.
pub trait TextExtractor: Send + Sync {
    fn extract(&self, html: &[u8], declared_charset: Option<&str>) -> String;
}

/// Default extractor: drops non-content elements, one line per block element.
#[derive(Clone, Copy, Debug, Default)]
pub struct StructuralExtractor;

impl TextExtractor for StructuralExtractor {
    fn extract(&self, html: &[u8], declared_charset: Option<&str>) -> String {
        extract_text(html, declared_charset)
    }
}

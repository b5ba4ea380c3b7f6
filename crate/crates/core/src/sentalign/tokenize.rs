use crate::corpus::LangCode;
use crate::lexicon::Lexicon;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CharClass {
    Kanji,
    Hiragana,
    Katakana,
    Digit,
    Latin,
}

fn class_of(c: char) -> CharClass {
    match c {
        '\u{4E00}'..='\u{9FFF}' | '\u{3400}'..='\u{4DBF}' | '\u{F900}'..='\u{FAFF}' | '々' | '〆' | 'ヶ' => CharClass::Kanji,
        '\u{3040}'..='\u{309F}' => CharClass::Hiragana,
        '\u{30A0}'..='\u{30FF}' | '\u{31F0}'..='\u{31FF}' | '\u{FF66}'..='\u{FF9F}' => CharClass::Katakana,
        c if c.is_numeric() => CharClass::Digit,
        _ => CharClass::Latin,
    }
}

fn flush_unmatched(span: &mut Vec<char>, out: &mut Vec<String>) {
    let mut start = 0;
    for i in 1..=span.len() {
        if i == span.len() || class_of(span[i]) != class_of(span[start]) {
            out.push(span[start..i].iter().collect());
            start = i;
        }
    }
    span.clear();
}

fn tokenize_ja(text: &str, lexicon: &Lexicon) -> Vec<String> {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let max_len = lexicon.max_cjk_word_chars();
    let mut out = Vec::new();
    let mut unmatched = Vec::new();
    let mut buf = String::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_alphanumeric() {
            flush_unmatched(&mut unmatched, &mut out);
            i += 1;
            continue;
        }
        let longest = (1..=max_len.min(chars.len() - i)).rev().find(|&len| {
            buf.clear();
            buf.extend(&chars[i..i + len]);
            lexicon.contains_cjk_word(&buf)
        });
        match longest {
            Some(len) => {
                flush_unmatched(&mut unmatched, &mut out);
                out.push(chars[i..i + len].iter().collect());
                i += len;
            }
            None => {
                unmatched.push(chars[i]);
                i += 1;
            }
        }
    }
    flush_unmatched(&mut unmatched, &mut out);
    out
}

/// Word tokens used for lexicon lookups.
///
/// English (and any non-Japanese language): lowercase alphanumeric runs.
/// Japanese: greedy longest match against the lexicon's non-ASCII words, with
/// unmatched spans cut at script boundaries (kanji, hiragana, katakana, digits, latin).
pub fn tokenize(text: &str, lang: &LangCode, lexicon: &Lexicon) -> Vec<String> {
    if lang.is_ja() {
        return tokenize_ja(text, lexicon);
    }
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn is_digit_string(token: &str) -> bool {
    !token.is_empty() && token.bytes().all(|b| b.is_ascii_digit())
}

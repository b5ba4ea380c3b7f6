//! Rule-based sentence splitting for English and Japanese.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::corpus::LangCode;

/// Tokens (without the final period) that never end a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "Prof", "Sr", "Jr", "St", "Mt", "etc", "e.g", "i.e", "E.g", "I.e",
    "vs", "Vs", "cf", "al", "Fig", "fig", "Figs", "No", "no", "Nos", "Vol", "vol", "pp", "p",
    "Inc", "Ltd", "Co", "Corp", "Dept", "approx", "Jan", "Feb", "Mar", "Apr", "Jun", "Jul",
    "Aug", "Sep", "Sept", "Oct", "Nov", "Dec", "U.S", "U.K", "a.m", "p.m", "Ph.D", "Rev", "Gen",
    "Col", "Capt", "Lt", "Sgt", "Gov", "Sen", "Rep", "Ave", "Blvd", "Rd",
];

const JA_TERMINATORS: &[char] = &['。', '｡', '！', '？', '．', '!', '?', '.'];
const CLOSERS: &[char] = &['」', '』', '）', ')', '］', ']', '】', '〉', '》', '”', '’', '"', '\''];

#[derive(Clone, Debug)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        SentenceSplitter::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SentenceSplitter {
            abbreviations: abbreviations
                .into_iter()
                .map(|a| a.into().trim_end_matches('.').to_owned())
                .collect(),
        }
    }

    pub fn split(&self, text: &str, lang: &LangCode) -> Vec<String> {
        let mut out = Vec::new();
        for line in text.lines() {
            let chars: Vec<char> = line.chars().collect();
            let cuts = if lang.is_ja() {
                self.ja_boundaries(&chars)
            } else {
                self.en_boundaries(&chars)
            };
            let mut start = 0;
            for cut in cuts.into_iter().chain(std::iter::once(chars.len())) {
                let s: String = chars[start..cut].iter().collect();
                let s = s.trim();
                if !s.is_empty() {
                    out.push(s.to_owned());
                }
                start = cut;
            }
        }
        out
    }

    fn is_abbreviation(&self, chars: &[char], period: usize) -> bool {
        let word_start = chars[..period]
            .iter()
            .rposition(|c| c.is_whitespace())
            .map_or(0, |p| p + 1);
        let word: String = chars[word_start..period]
            .iter()
            .skip_while(|c| matches!(c, '(' | '[' | '"' | '\'' | '“' | '‘'))
            .collect();
        let mut it = word.chars();
        // Single capital initial, as in "J. Smith".
        if let (Some(c), None) = (it.next(), it.next()) {
            if c.is_uppercase() {
                return true;
            }
        }
        self.abbreviations.contains(&word)
    }

    /// Split after `.`/`!`/`?` (plus closers) followed by whitespace and an uppercase letter.
    fn en_boundaries(&self, chars: &[char]) -> Vec<usize> {
        let mut cuts = Vec::new();
        for i in 0..chars.len() {
            if !matches!(chars[i], '.' | '!' | '?') {
                continue;
            }
            let mut j = i + 1;
            while j < chars.len() && CLOSERS.contains(&chars[j]) {
                j += 1;
            }
            if j >= chars.len() || !chars[j].is_whitespace() {
                continue;
            }
            let mut k = j;
            while k < chars.len() && chars[k].is_whitespace() {
                k += 1;
            }
            if k < chars.len() && chars[k].is_uppercase() {
                if chars[i] == '.' && self.is_abbreviation(chars, i) {
                    continue;
                }
                cuts.push(j);
            }
        }
        cuts
    }

    /// Split after Japanese terminators, keeping trailing closing quotes and brackets.
    /// ASCII `.`, `!`, `?` only count when not followed by an ASCII letter or digit,
    /// and a lone `.` after a known abbreviation never does.
    fn ja_boundaries(&self, chars: &[char]) -> Vec<usize> {
        let mut cuts = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if !JA_TERMINATORS.contains(&chars[i]) {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < chars.len() && JA_TERMINATORS.contains(&chars[j]) {
                j += 1;
            }
            let ascii_only = chars[i..j].iter().all(char::is_ascii);
            let abbreviated = j == i + 1 && chars[i] == '.' && self.is_abbreviation(chars, i);
            while j < chars.len() && CLOSERS.contains(&chars[j]) {
                j += 1;
            }
            let glued = chars.get(j).is_some_and(char::is_ascii_alphanumeric);
            if j < chars.len() && !(ascii_only && glued) && !abbreviated {
                cuts.push(j);
            }
            i = j;
        }
        cuts
    }
}

fn default_splitter() -> &'static SentenceSplitter {
    static SPLITTER: OnceLock<SentenceSplitter> = OnceLock::new();
    SPLITTER.get_or_init(SentenceSplitter::default)
}

/// Splits text into trimmed, non-empty sentences with the default abbreviation list.
pub fn split_sentences(text: &str, lang: &LangCode) -> Vec<String> {
    default_splitter().split(text, lang)
}

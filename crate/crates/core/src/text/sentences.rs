use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::Span;

/// Shipped abbreviation list, one lowercase entry per line, `#` comments.
pub const DEFAULT_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// Rule-based sentence splitter.
///
/// A sentence ends after `.`, `!` or `?` (plus any closing quotes, brackets
/// or further terminal marks) when whitespace or the end of text follows,
/// unless the period closes a listed abbreviation or a single-letter
/// initial. A blank line always ends a sentence; with `line_breaks` set,
/// every newline does. Case is never consulted, so splitting is invariant
/// to upper/lower-casing the input.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: BTreeSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::from_list(DEFAULT_ABBREVIATIONS)
    }
}

fn is_closer(c: char) -> bool {
    matches!(c, ')' | ']' | '}' | '"' | '\'' | '\u{201D}' | '\u{2019}')
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

impl SentenceSplitter {
    /// Parses a newline-separated abbreviation list; blank lines and lines
    /// starting with `#` are ignored.
    pub fn from_list(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_end_matches('.').to_lowercase())
            .collect();
        SentenceSplitter { abbreviations }
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(&word.to_lowercase())
    }

    // The period at `chars[dot]` closes an abbreviation or an initial.
    fn period_is_abbreviation(&self, chars: &[(usize, char)], text: &str, dot: usize) -> bool {
        let mut k = dot;
        while k > 0 && (chars[k - 1].1.is_alphabetic() || chars[k - 1].1 == '.') {
            k -= 1;
        }
        if k == dot {
            return false;
        }
        let word = text[chars[k].0..chars[dot].0].trim_matches('.');
        if word.is_empty() {
            return false;
        }
        if word.chars().count() == 1 {
            return true;
        }
        self.is_abbreviation(word)
    }

    /// Sentence spans of `text`: ordered, non-overlapping, trimmed of
    /// surrounding whitespace, and together covering every non-whitespace
    /// character.
    pub fn split(&self, text: &str, line_breaks: bool) -> Vec<Span> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let byte_end = |k: usize| chars.get(k).map_or(text.len(), |&(b, _)| b);
        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        let mut last_end = 0;
        let mut newlines = 0;
        let mut i = 0;
        let mut close = |start: &mut Option<usize>, last_end: usize| {
            if let Some(s) = start.take() {
                spans.push(Span::new(s, last_end));
            }
        };
        while i < chars.len() {
            let c = chars[i].1;
            if c.is_whitespace() {
                if c == '\n' {
                    newlines += 1;
                    if line_breaks || newlines >= 2 {
                        close(&mut start, last_end);
                    }
                }
                i += 1;
                continue;
            }
            newlines = 0;
            if start.is_none() {
                start = Some(chars[i].0);
            }
            if !is_terminal(c) {
                last_end = byte_end(i + 1);
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < chars.len() && (is_terminal(chars[j].1) || is_closer(chars[j].1)) {
                j += 1;
            }
            last_end = byte_end(j);
            let at_gap = j == chars.len() || chars[j].1.is_whitespace();
            let single_period = c == '.' && j == i + 1;
            if at_gap && !(single_period && self.period_is_abbreviation(&chars, text, i)) {
                close(&mut start, last_end);
            }
            i = j;
        }
        close(&mut start, last_end);
        spans
    }
}

use alloc::vec::Vec;

use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// Contains at least one letter.
    Word,
    /// Digits, possibly with `.`/`,` separators between digits.
    Number,
    /// Any other single non-whitespace character.
    Symbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub span: Span,
    pub kind: TokenKind,
}

/// Splits text into tokens.
///
/// Implementations must never produce a token that spans whitespace: chunk
/// planning relies on token counts being additive across whitespace-separated
/// pieces of a document.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Vec<Token>;

    fn count(&self, text: &str) -> usize {
        self.tokenize(text).len()
    }

    /// Identifier of the rule set, recorded with outputs.
    fn rules_version(&self) -> &'static str;
}

/// Whitespace/punctuation word pieces.
///
/// Rules (`wordpiece-v1`):
/// - a token is a maximal run of alphanumeric characters;
/// - `'` and `’` join two letters (`company's`), `-` joins two alphanumerics
///   (`net-zero`), `.` and `,` join two digits (`5.2`, `1,000`);
/// - every other non-whitespace character is a token on its own.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordPieceTokenizer;

impl WordPieceTokenizer {
    pub const RULES_VERSION: &'static str = "wordpiece-v1";
}

fn joins(prev: char, joiner: char, next: char) -> bool {
    match joiner {
        '\'' | '\u{2019}' => prev.is_alphabetic() && next.is_alphabetic(),
        '-' => prev.is_alphanumeric() && next.is_alphanumeric(),
        '.' | ',' => prev.is_ascii_digit() && next.is_ascii_digit(),
        _ => false,
    }
}

impl Tokenizer for WordPieceTokenizer {
    fn tokenize(&self, text: &str) -> Vec<Token> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let end_of = |k: usize| chars.get(k).map_or(text.len(), |&(b, _)| b);
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i].1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if !c.is_alphanumeric() {
                out.push(Token {
                    span: Span::new(chars[i].0, end_of(i + 1)),
                    kind: TokenKind::Symbol,
                });
                i += 1;
                continue;
            }
            let start = i;
            let mut has_alpha = c.is_alphabetic();
            let mut j = i + 1;
            while j < chars.len() {
                let d = chars[j].1;
                if d.is_alphanumeric() {
                    has_alpha |= d.is_alphabetic();
                    j += 1;
                } else if j + 1 < chars.len() && joins(chars[j - 1].1, d, chars[j + 1].1) {
                    has_alpha |= chars[j + 1].1.is_alphabetic();
                    j += 2;
                } else {
                    break;
                }
            }
            out.push(Token {
                span: Span::new(chars[start].0, end_of(j)),
                kind: if has_alpha { TokenKind::Word } else { TokenKind::Number },
            });
            i = j;
        }
        out
    }

    fn rules_version(&self) -> &'static str {
        Self::RULES_VERSION
    }
}

/// Word tokens (tokens containing a letter) of `text` under the default rules.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    WordPieceTokenizer
        .tokenize(text)
        .into_iter()
        .filter(|t| t.kind == TokenKind::Word)
        .map(move |t| t.span.slice(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pieces(text: &str) -> Vec<&str> {
        WordPieceTokenizer
            .tokenize(text)
            .iter()
            .map(|t| t.span.slice(text))
            .collect()
    }

    #[test]
    fn splits_words_numbers_and_symbols() {
        assert_eq!(
            pieces("Revenue rose 5.2% to $1,000 (net-zero)."),
            vec!["Revenue", "rose", "5.2", "%", "to", "$", "1,000", "(", "net-zero", ")", "."]
        );
    }

    #[test]
    fn apostrophes_join_letters_only() {
        assert_eq!(pieces("company's 'quoted'"), vec!["company's", "'", "quoted", "'"]);
        assert_eq!(pieces("we’re"), vec!["we’re"]);
    }

    #[test]
    fn trailing_separator_is_not_joined() {
        assert_eq!(pieces("2020. Next"), vec!["2020", ".", "Next"]);
        assert_eq!(pieces("a-"), vec!["a", "-"]);
    }

    #[test]
    fn kinds() {
        let t = WordPieceTokenizer.tokenize("Q4 2021 !");
        let kinds: Vec<_> = t.iter().map(|t| t.kind).collect();
        assert_eq!(kinds, vec![TokenKind::Word, TokenKind::Number, TokenKind::Symbol]);
    }

    #[test]
    fn words_skip_numbers_and_symbols() {
        let w: Vec<_> = words("Sales of 5 units, up 3%.").collect();
        assert_eq!(w, vec!["Sales", "of", "units", "up"]);
    }
}

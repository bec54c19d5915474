use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::words;
use crate::{Error, Result};

/// Financial word lists. Entries are stored upper-cased; matching is
/// case-insensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
    pub uncertainty: BTreeSet<String>,
    /// Multi-syllable words that Fog does not count as complex.
    pub fog_whitelist: BTreeSet<String>,
}

fn upper_set<I, S>(words: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    words
        .into_iter()
        .map(|w| w.as_ref().trim().to_uppercase())
        .filter(|w| !w.is_empty())
        .collect()
}

impl Lexicon {
    /// Fails if a word is both positive and negative.
    pub fn new<I, S>(positive: I, negative: I, uncertainty: I, fog_whitelist: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let lex = Lexicon {
            positive: upper_set(positive),
            negative: upper_set(negative),
            uncertainty: upper_set(uncertainty),
            fog_whitelist: upper_set(fog_whitelist),
        };
        if let Some(w) = lex.positive.intersection(&lex.negative).next() {
            return Err(Error::InvalidParameter(alloc::format!(
                "{w:?} is in both the positive and negative lists"
            )));
        }
        Ok(lex)
    }

    /// One word per line; blank lines and `#` comments skipped. Only the
    /// first whitespace-separated field of a line is used.
    pub fn parse_word_list(text: &str) -> Vec<String> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_whitespace().next())
            .map(String::from)
            .collect()
    }

    /// The same lexicon with the positive and negative lists exchanged.
    pub fn swapped(&self) -> Lexicon {
        Lexicon {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
            ..self.clone()
        }
    }

    pub fn counts(&self, text: &str) -> LexiconCounts {
        let mut c = LexiconCounts::default();
        for w in words(text) {
            let up = w.to_uppercase();
            c.words += 1;
            c.positive += usize::from(self.positive.contains(&up));
            c.negative += usize::from(self.negative.contains(&up));
            c.uncertainty += usize::from(self.uncertainty.contains(&up));
        }
        c
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LexiconCounts {
    pub words: usize,
    pub positive: usize,
    pub negative: usize,
    pub uncertainty: usize,
}

/// `(P − N) / (P + N)` over dictionary hits; `None` when there are none.
pub fn sentiment(text: &str, lexicon: &Lexicon) -> Option<f64> {
    let c = lexicon.counts(text);
    let total = c.positive + c.negative;
    if total == 0 {
        None
    } else {
        Some((c.positive as f64 - c.negative as f64) / total as f64)
    }
}

/// Uncertainty-word hits per word.
pub fn uncertainty(text: &str, lexicon: &Lexicon) -> Result<f64> {
    let c = lexicon.counts(text);
    if c.words == 0 {
        return Err(Error::EmptyDocument);
    }
    Ok(c.uncertainty as f64 / c.words as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lex() -> Lexicon {
        Lexicon::new(
            vec!["gain", "strong", "improve"],
            vec!["loss", "weak"],
            vec!["may", "uncertain"],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn sentiment_examples() {
        let l = lex();
        assert_eq!(sentiment("Strong gain, improve again; one loss.", &l), Some(0.5));
        assert_eq!(sentiment("gain loss", &l), Some(0.0));
        assert_eq!(sentiment("nothing to see", &l), None);
        assert_eq!(sentiment("", &l), None);
    }

    #[test]
    fn uncertainty_examples() {
        let l = lex();
        let mut text = String::new();
        for i in 0..100 {
            text.push_str(if i < 2 { "may " } else { "word " });
        }
        assert!((uncertainty(&text, &l).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(uncertainty("plain words", &l).unwrap(), 0.0);
        assert_eq!(uncertainty("may May MAY", &l).unwrap(), 1.0);
        assert_eq!(uncertainty("123 !", &l), Err(Error::EmptyDocument));
    }

    #[test]
    fn overlapping_lists_rejected() {
        assert!(Lexicon::new(vec!["a"], vec!["A"], vec![], vec![]).is_err());
    }

    #[test]
    fn word_list_parsing() {
        let parsed = Lexicon::parse_word_list("# comment\nABLE\n\n  gain 2009\n");
        assert_eq!(parsed, vec![String::from("ABLE"), String::from("gain")]);
    }
}

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SyllableCounter;
use crate::text::{words, SentenceSplitter};
use crate::{Error, Result};

fn counts<'a>(text: &'a str, splitter: &SentenceSplitter) -> Result<(Vec<&'a str>, usize)> {
    let sentences = splitter.split(text, false).len();
    let w: Vec<&str> = words(text).collect();
    if sentences == 0 || w.is_empty() {
        return Err(Error::EmptyDocument);
    }
    Ok((w, sentences))
}

/// Gunning Fog: `0.4 × (words/sentence + 100 × complex/words)`. A word is
/// complex with three or more syllables, unless it is on the (upper-case)
/// financial-term whitelist.
pub fn fog(
    text: &str,
    whitelist: &BTreeSet<String>,
    splitter: &SentenceSplitter,
    syllables: &SyllableCounter,
) -> Result<f64> {
    let (w, sentences) = counts(text, splitter)?;
    let complex = w
        .iter()
        .filter(|word| syllables.count(word) >= 3 && !whitelist.contains(&word.to_uppercase()))
        .count();
    let n = w.len() as f64;
    Ok(0.4 * (n / sentences as f64 + 100.0 * complex as f64 / n))
}

const BE_FORMS: [&str; 8] = ["am", "is", "are", "was", "were", "be", "been", "being"];

const IRREGULAR_PARTICIPLES: [&str; 64] = [
    "arisen", "beaten", "become", "begun", "bent", "bid", "borne", "born", "bought", "bound",
    "brought", "built", "caught", "chosen", "cut", "dealt", "done", "drawn", "driven", "eaten",
    "fallen", "felt", "forgiven", "forgotten", "found", "frozen", "given", "gone", "gotten", "grown",
    "held", "hidden", "hit", "hurt", "kept", "known", "laid", "led", "left", "lent", "lost", "made",
    "meant", "met", "paid", "put", "read", "risen", "seen", "sent", "set", "shown", "sold", "sought",
    "spent", "spoken", "stolen", "struck", "taken", "taught", "thought", "told", "understood", "written",
];

const PRONOUNS: [&str; 31] = [
    "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "you", "your", "yours",
    "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself", "it",
    "its", "itself", "they", "them", "their", "theirs", "themselves",
];

fn is_participle(word: &str) -> bool {
    (word.len() > 3 && word.ends_with("ed")) || IRREGULAR_PARTICIPLES.contains(&word)
}

/// A form of "to be", optionally followed by one `-ly` adverb, then a past
/// participle.
fn passive_count(lower: &[String]) -> usize {
    let mut n = 0;
    for (i, w) in lower.iter().enumerate() {
        if !BE_FORMS.contains(&w.as_str()) {
            continue;
        }
        let next = lower.get(i + 1).map(String::as_str);
        let after = lower.get(i + 2).map(String::as_str);
        match (next, after) {
            (Some(p), _) if is_participle(p) => n += 1,
            (Some(adv), Some(p)) if adv.ends_with("ly") && is_participle(p) => n += 1,
            _ => {}
        }
    }
    n
}

/// The five plain-English components; higher means less readable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlainEnglishComponents {
    pub words_per_sentence: f64,
    pub chars_per_word: f64,
    pub passive_per_word: f64,
    pub pronouns_per_word: f64,
    pub respectively_per_word: f64,
}

impl PlainEnglishComponents {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.words_per_sentence,
            self.chars_per_word,
            self.passive_per_word,
            self.pronouns_per_word,
            self.respectively_per_word,
        ]
    }

    pub fn raw_sum(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

pub fn plain_english_components(text: &str, splitter: &SentenceSplitter) -> Result<PlainEnglishComponents> {
    let (w, sentences) = counts(text, splitter)?;
    let lower: Vec<String> = w.iter().map(|s| s.to_lowercase()).collect();
    let n = w.len() as f64;
    let chars: usize = w.iter().map(|s| s.chars().count()).sum();
    let pronouns = lower.iter().filter(|s| PRONOUNS.contains(&s.as_str())).count();
    let respectively = lower.iter().filter(|s| *s == "respectively").count();
    Ok(PlainEnglishComponents {
        words_per_sentence: n / sentences as f64,
        chars_per_word: chars as f64 / n,
        passive_per_word: passive_count(&lower) as f64 / n,
        pronouns_per_word: pronouns as f64 / n,
        respectively_per_word: respectively as f64 / n,
    })
}

/// Component means and standard deviations of a reference corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlainEnglishReference {
    pub mean: [f64; 5],
    pub sd: [f64; 5],
}

impl PlainEnglishReference {
    /// Sample (n−1) standard deviations; needs at least one document.
    pub fn from_components(components: &[PlainEnglishComponents]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::AllMissing);
        }
        let mut mean = [0.0; 5];
        let mut sd = [0.0; 5];
        for k in 0..5 {
            let xs: Vec<f64> = components.iter().map(|c| c.as_array()[k]).collect();
            mean[k] = crate::stats::mean(&xs).unwrap_or(0.0);
            sd[k] = crate::stats::std_dev(&xs, 1).unwrap_or(0.0);
        }
        Ok(PlainEnglishReference { mean, sd })
    }

    /// Sum of component z-scores; a component with zero spread contributes 0.
    pub fn standardize(&self, c: &PlainEnglishComponents) -> f64 {
        c.as_array()
            .iter()
            .enumerate()
            .map(|(k, x)| if self.sd[k] > 0.0 { (x - self.mean[k]) / self.sd[k] } else { 0.0 })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlainEnglishMode {
    Raw,
    #[default]
    Standardized,
}

pub fn plain_english(
    text: &str,
    splitter: &SentenceSplitter,
    mode: PlainEnglishMode,
    reference: Option<&PlainEnglishReference>,
) -> Result<f64> {
    let c = plain_english_components(text, splitter)?;
    match (mode, reference) {
        (PlainEnglishMode::Raw, _) => Ok(c.raw_sum()),
        (PlainEnglishMode::Standardized, Some(r)) => Ok(r.standardize(&c)),
        (PlainEnglishMode::Standardized, None) => Err(Error::MissingReference),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repeat(word: &str, n: usize) -> String {
        let mut s = String::new();
        for i in 0..n {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(word);
        }
        s
    }

    #[test]
    fn fog_without_complex_words() {
        let text = repeat("cash", 10) + ".";
        let f = fog(&text, &BTreeSet::new(), &SentenceSplitter::default(), &SyllableCounter::default()).unwrap();
        assert!((f - 4.0).abs() < 1e-12);
    }

    #[test]
    fn whitelist_exempts_complex_words() {
        let text = repeat("revenue", 10) + ".";
        let splitter = SentenceSplitter::default();
        let syl = SyllableCounter::default();
        let none = fog(&text, &BTreeSet::new(), &splitter, &syl).unwrap();
        assert!((none - 0.4 * (10.0 + 100.0)).abs() < 1e-12);
        let wl: BTreeSet<String> = [String::from("REVENUE")].into_iter().collect();
        assert!((fog(&text, &wl, &splitter, &syl).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fog_twenty_words_ten_percent_complex() {
        // Two 20-word sentences, 4 of the 40 words have three or more syllables.
        let s1 = repeat("cash", 18) + " revenue company.";
        let s2 = repeat("stock", 18) + " customer estimate.";
        let text = s1 + " " + &s2;
        let f = fog(&text, &BTreeSet::new(), &SentenceSplitter::default(), &SyllableCounter::default()).unwrap();
        assert!((f - 12.0).abs() < 1e-12, "{f}");
    }

    #[test]
    fn fog_needs_words() {
        let r = fog("", &BTreeSet::new(), &SentenceSplitter::default(), &SyllableCounter::default());
        assert_eq!(r, Err(Error::EmptyDocument));
    }

    #[test]
    fn plain_english_raw_sum() {
        // 20 five-letter words in one sentence, no passives, pronouns or "respectively".
        let text = repeat("sales", 20) + ".";
        let v = plain_english(&text, &SentenceSplitter::default(), PlainEnglishMode::Raw, None).unwrap();
        assert!((v - 25.0).abs() < 1e-12);
    }

    #[test]
    fn plain_english_standardized_at_mean_is_zero() {
        let splitter = SentenceSplitter::default();
        let texts = ["We sold it. They were paid.", "Sales rose respectively in both units.", "It was widely reported."];
        let comps: Vec<_> = texts.iter().map(|t| plain_english_components(t, &splitter).unwrap()).collect();
        let mut reference = PlainEnglishReference::from_components(&comps).unwrap();
        reference.mean = comps[1].as_array();
        let v = plain_english(texts[1], &splitter, PlainEnglishMode::Standardized, Some(&reference)).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(
            plain_english(texts[1], &splitter, PlainEnglishMode::Standardized, None),
            Err(Error::MissingReference)
        );
    }

    #[test]
    fn respectively_is_monotone() {
        let splitter = SentenceSplitter::default();
        let one = "Units one and two grew respectively by a lot in the year.";
        let two = "Units one and two grew respectively respectively by a lot in the year.";
        let a = plain_english(one, &splitter, PlainEnglishMode::Raw, None).unwrap();
        let b = plain_english(two, &splitter, PlainEnglishMode::Raw, None).unwrap();
        assert!(b > a);
    }

    #[test]
    fn passive_detection() {
        let lower: Vec<String> = ["the", "plant", "was", "sold", "and", "is", "widely", "expected", "to", "be", "big"]
            .iter()
            .map(|s| String::from(*s))
            .collect();
        assert_eq!(passive_count(&lower), 2);
        let c = plain_english_components("We think you and I like it.", &SentenceSplitter::default()).unwrap();
        assert!((c.pronouns_per_word - 4.0 / 7.0).abs() < 1e-12);
    }
}

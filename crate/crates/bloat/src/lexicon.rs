//! Loading word lists from a lexicon directory.

use std::path::Path;

use bloat_core::metrics::Lexicon;

use crate::{Error, Result};

pub const LEXICON_FILES: [&str; 4] = ["positive.txt", "negative.txt", "uncertainty.txt", "fog_whitelist.txt"];

/// Reads `positive.txt`, `negative.txt`, `uncertainty.txt` and
/// `fog_whitelist.txt`. A missing whitelist means no exemptions; the other
/// three are required.
pub fn load_lexicon(dir: &Path) -> Result<Lexicon> {
    let read = |name: &str, required: bool| -> Result<Vec<String>> {
        let path = dir.join(name);
        if !path.exists() && !required {
            return Ok(Vec::new());
        }
        if !path.exists() {
            return Err(Error::Config(format!("lexicon file {} not found", path.display())));
        }
        Ok(Lexicon::parse_word_list(&crate::io::read_to_string(&path)?))
    };
    Ok(Lexicon::new(
        read("positive.txt", true)?,
        read("negative.txt", true)?,
        read("uncertainty.txt", true)?,
        read("fog_whitelist.txt", false)?,
    )?)
}

/// Theme keyword list `theme_<name>.txt`, if present.
pub fn load_theme(dir: &Path, theme: &str) -> Result<Option<Vec<String>>> {
    let path = dir.join(format!("theme_{theme}.txt"));
    if !path.exists() {
        return Ok(None);
    }
    let words = Lexicon::parse_word_list(&crate::io::read_to_string(&path)?);
    Ok(Some(words.into_iter().map(|w| w.to_lowercase()).collect()))
}

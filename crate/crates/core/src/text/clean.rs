use alloc::string::String;

use super::DocumentKind;

/// Removes non-narrative content from a document.
///
/// MD&A text loses markup tags, `<table>` blocks, scripts, styles,
/// comments and XBRL header blocks; entities are decoded and whitespace is
/// collapsed. Transcripts lose every `[...]` expression (`[ph]`, `[indiscernible]`)
/// and keep their spacing otherwise. Numbers are never touched. Both kinds are
/// trimmed at the ends. The result is a fixpoint: cleaning it again is a no-op.
pub fn clean_text(text: &str, kind: DocumentKind) -> String {
    let mut current = normalize_newlines(text);
    loop {
        let next = match kind {
            DocumentKind::Mdna => clean_markup_pass(&current),
            DocumentKind::CallTranscript => clean_transcript_pass(&current),
        };
        if next == current {
            return next;
        }
        current = next;
    }
}

fn normalize_newlines(text: &str) -> String {
    text.replace("\r\n", "\n").replace('\r', "\n")
}

fn clean_transcript_pass(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    // Drop innermost bracket pairs; nested pairs unwrap over passes.
    while let Some(open) = rest.find('[') {
        let after = &rest[open + 1..];
        match (after.find(']'), after.find('[')) {
            (Some(close), next_open) if next_open.map_or(true, |n| n > close) => {
                out.push_str(&rest[..open]);
                rest = &after[close + 1..];
            }
            (Some(_), Some(next_open)) => {
                out.push_str(&rest[..open + 1 + next_open]);
                rest = &after[next_open..];
            }
            _ => break,
        }
    }
    out.push_str(rest);
    String::from(out.trim())
}

const DROPPED_BLOCKS: [&str; 6] = ["table", "script", "style", "ix:header", "xbrl", "head"];
const BLOCK_TAGS: [&str; 18] = [
    "p", "div", "br", "tr", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6", "hr", "table",
    "section", "article", "page",
];

fn clean_markup_pass(text: &str) -> String {
    let decoded = decode_entities(text);
    let mut without_blocks = remove_comments(&decoded);
    for name in DROPPED_BLOCKS {
        without_blocks = remove_blocks(&without_blocks, name);
    }
    let stripped = strip_tags(&without_blocks);
    collapse_whitespace(&stripped)
}

fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    let hay = haystack.as_bytes();
    let nee = needle.as_bytes();
    if nee.is_empty() || hay.len() < nee.len() {
        return None;
    }
    (from..=hay.len() - nee.len()).find(|&i| hay[i..i + nee.len()].eq_ignore_ascii_case(nee))
}

// Position of an opening `<name` tag at or after `from`, where `name` is
// followed by whitespace, `>` or `/`.
fn find_open_tag(text: &str, name: &str, from: usize) -> Option<usize> {
    let pattern = alloc::format!("<{name}");
    let mut at = from;
    while let Some(i) = find_ci(text, &pattern, at) {
        let next = text.as_bytes().get(i + pattern.len()).copied();
        if matches!(next, None | Some(b'>') | Some(b'/') | Some(b' ' | b'\t' | b'\n')) {
            return Some(i);
        }
        at = i + 1;
    }
    None
}

fn remove_blocks(text: &str, name: &str) -> String {
    let close = alloc::format!("</{name}>");
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    while let Some(open) = find_open_tag(text, name, pos) {
        out.push_str(&text[pos..open]);
        // Match nested blocks of the same name.
        let mut depth = 1usize;
        let mut cursor = open + 1;
        let mut end = text.len();
        while depth > 0 {
            let next_open = find_open_tag(text, name, cursor);
            match find_ci(text, &close, cursor) {
                Some(c) if next_open.map_or(true, |o| c < o) => {
                    depth -= 1;
                    cursor = c + close.len();
                    if depth == 0 {
                        end = cursor;
                    }
                }
                Some(_) => {
                    depth += 1;
                    cursor = next_open.unwrap_or(text.len()) + 1;
                }
                None => break,
            }
        }
        out.push('\n');
        pos = end;
    }
    out.push_str(&text[pos..]);
    out
}

fn remove_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    while let Some(i) = text[pos..].find("<!--").map(|i| i + pos) {
        out.push_str(&text[pos..i]);
        pos = text[i + 4..].find("-->").map_or(text.len(), |j| i + 4 + j + 3);
    }
    out.push_str(&text[pos..]);
    out
}

fn strip_tags(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'<' {
            let next = bytes.get(i + 1).copied().unwrap_or(b' ');
            if next.is_ascii_alphabetic() || next == b'/' || next == b'!' || next == b'?' {
                if let Some(close) = text[i..].find('>') {
                    let inner = &text[i + 1..i + close];
                    if !inner.contains('<') {
                        out.push_str(&text[pos..i]);
                        let name = inner
                            .trim_start_matches('/')
                            .split(|c: char| c.is_whitespace() || c == '/')
                            .next()
                            .unwrap_or("");
                        if BLOCK_TAGS.iter().any(|b| b.eq_ignore_ascii_case(name)) {
                            out.push('\n');
                        } else if name.eq_ignore_ascii_case("td") || name.eq_ignore_ascii_case("th") {
                            out.push(' ');
                        }
                        i += close + 1;
                        pos = i;
                        continue;
                    }
                }
            }
        }
        i += 1;
    }
    out.push_str(&text[pos..]);
    out
}

const ENTITIES: [(&str, &str); 16] = [
    ("amp", "&"),
    ("lt", "<"),
    ("gt", ">"),
    ("quot", "\""),
    ("apos", "'"),
    ("nbsp", " "),
    ("rsquo", "\u{2019}"),
    ("lsquo", "\u{2018}"),
    ("rdquo", "\u{201D}"),
    ("ldquo", "\u{201C}"),
    ("mdash", "\u{2014}"),
    ("ndash", "\u{2013}"),
    ("bull", "\u{2022}"),
    ("hellip", "\u{2026}"),
    ("reg", "\u{00AE}"),
    ("copy", "\u{00A9}"),
];

fn decode_entity(body: &str) -> Option<char> {
    if let Some(num) = body.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return match code {
            0xA0 => Some(' '),
            c => char::from_u32(c),
        };
    }
    ENTITIES
        .iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(body))
        .and_then(|(_, rep)| rep.chars().next())
}

fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp + 1..];
        let semi = tail.find(';').filter(|&s| s > 0 && s <= 10);
        match semi.and_then(|s| decode_entity(&tail[..s]).map(|c| (s, c))) {
            Some((s, c)) => {
                out.push(c);
                rest = &tail[s + 1..];
            }
            None => {
                out.push('&');
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    out
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut blank_run = 0;
    for line in text.split('\n') {
        let mut collapsed = String::with_capacity(line.len());
        for word in line.split(|c: char| c.is_whitespace()).filter(|w| !w.is_empty()) {
            if !collapsed.is_empty() {
                collapsed.push(' ');
            }
            collapsed.push_str(word);
        }
        if collapsed.is_empty() {
            blank_run += 1;
            continue;
        }
        if !out.is_empty() {
            out.push_str(if blank_run > 0 { "\n\n" } else { "\n" });
        }
        blank_run = 0;
        out.push_str(&collapsed);
    }
    out
}

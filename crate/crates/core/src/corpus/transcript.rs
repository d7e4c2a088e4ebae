use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use super::{normalize_whitespace, Document, DocumentKind};
use crate::error::{Error, Result};

static TIMESTAMP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\[?(\d{1,2}:)?\d{1,2}:\d{2}([.,]\d{1,3})?\]?$").unwrap());
static INLINE_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]*>").unwrap());

/// Spoken text of a transcript. Files that look like timed captions (a
/// `WEBVTT` header or any `-->` cue timing) lose their header, cue numbers,
/// timing lines and inline tags; bare timestamp lines are dropped in every
/// format.
pub fn strip_captions(text: &str) -> String {
    let text = text.trim_start_matches('\u{feff}');
    let captions = text.trim_start().starts_with("WEBVTT") || text.contains("-->");
    let mut spoken = Vec::new();
    let mut in_header = text.trim_start().starts_with("WEBVTT");
    let mut in_block = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            in_header = false;
            in_block = false;
            continue;
        }
        if in_header || in_block || TIMESTAMP.is_match(line) {
            continue;
        }
        if captions {
            if line.contains("-->") || line.chars().all(|c| c.is_ascii_digit()) {
                continue;
            }
            if ["NOTE", "STYLE", "REGION"]
                .iter()
                .any(|k| line.starts_with(k))
            {
                in_block = true;
                continue;
            }
            spoken.push(INLINE_TAG.replace_all(line, " ").into_owned());
        } else {
            spoken.push(line.to_owned());
        }
    }
    normalize_whitespace(&spoken.join(" "))
}

/// Reads a plain-text or timed-caption transcript. The document id is the
/// file stem.
pub fn load_transcript(path: &Path) -> Result<Document> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = strip_captions(&raw);
    if text.is_empty() {
        return Err(Error::EmptyDocument(id));
    }
    Ok(Document::new(id, DocumentKind::Transcript, text))
}

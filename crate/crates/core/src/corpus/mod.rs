//! Ingestion of video manifests, sampled frames, transcripts and API
//! reference pages.

mod frames;
mod html;
mod transcript;

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topics::{preprocess_text, PreprocessOptions};

pub use frames::{list_frame_files, load_frames, select_frames, Frame, FrameSequence};
pub use html::{extract_api_doc_text, load_api_docs};
pub use transcript::{load_transcript, strip_captions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VideoKind {
    DevScreencast,
    NonDevScreencast,
    NonScreencast,
    Other,
    Unknown,
}

impl fmt::Display for VideoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VideoKind::DevScreencast => "dev-screencast",
            VideoKind::NonDevScreencast => "non-dev-screencast",
            VideoKind::NonScreencast => "non-screencast",
            VideoKind::Other => "other",
            VideoKind::Unknown => "unknown",
        })
    }
}

/// One line of a video manifest. Relative paths are relative to the
/// manifest's directory; see [`VideoRecord::frame_dir_in`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub id: String,
    pub kind: VideoKind,
    pub frame_dir: PathBuf,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub transcript_path: Option<PathBuf>,
}

impl VideoRecord {
    pub fn frame_dir_in(&self, base: &Path) -> PathBuf {
        base.join(&self.frame_dir)
    }

    pub fn transcript_in(&self, base: &Path) -> Option<PathBuf> {
        self.transcript_path.as_ref().map(|p| base.join(p))
    }
}

/// Directory that relative paths inside the manifest at `path` resolve against.
pub fn manifest_base(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Reads a JSON-lines manifest. Blank lines are skipped; records keep file
/// order.
pub fn load_video_manifest(path: &Path) -> Result<Vec<VideoRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = manifest_base(path);
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: VideoRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId(record.id));
        }
        let dir = record.frame_dir_in(&base);
        if !dir.is_dir() {
            return Err(Error::MissingFrameDir(dir));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_video_manifest<W: Write>(records: &[VideoRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocumentKind {
    Title,
    Transcript,
    ApiDoc,
}

/// A unit of text. `tokens` is empty until [`Document::tokenize`] runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub kind: DocumentKind,
    pub raw_text: String,
    #[serde(default)]
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, kind: DocumentKind, raw_text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind,
            raw_text: raw_text.into(),
            tokens: Vec::new(),
        }
    }

    pub fn with_tokens(id: impl Into<String>, kind: DocumentKind, tokens: Vec<String>) -> Self {
        Self {
            id: id.into(),
            kind,
            raw_text: tokens.join(" "),
            tokens,
        }
    }

    pub fn tokenize(&mut self, opts: &PreprocessOptions) {
        self.tokens = preprocess_text(&self.raw_text, opts);
    }

    pub fn tokenized(mut self, opts: &PreprocessOptions) -> Self {
        self.tokenize(opts);
        self
    }
}

/// Collapses every run of whitespace into a single space and trims.
pub(crate) fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

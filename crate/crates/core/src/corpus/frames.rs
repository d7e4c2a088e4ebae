use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vectorspace::{quantize_frame, TermVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// Seconds from the start of the video.
    pub timestamp: f64,
    pub bag: TermVector,
}

/// Sampled frames of one video in strictly increasing time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSequence {
    pub video_id: String,
    frames: Vec<Frame>,
}

impl FrameSequence {
    pub fn new(video_id: impl Into<String>, frames: Vec<Frame>) -> Result<Self> {
        if let Some(w) = frames
            .windows(2)
            .find(|w| w[0].timestamp.partial_cmp(&w[1].timestamp) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::invalid(format!(
                "frame timestamps not strictly increasing ({} then {})",
                w[0].timestamp, w[1].timestamp
            )));
        }
        Ok(Self {
            video_id: video_id.into(),
            frames,
        })
    }

    /// Frames with timestamps 0, 1, 2, ...
    pub fn from_bags(video_id: impl Into<String>, bags: Vec<TermVector>) -> Self {
        let frames = bags
            .into_iter()
            .enumerate()
            .map(|(i, bag)| Frame {
                timestamp: i as f64,
                bag,
            })
            .collect();
        Self {
            video_id: video_id.into(),
            frames,
        }
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn bags(&self) -> impl Iterator<Item = &TermVector> {
        self.frames.iter().map(|f| &f.bag)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Frame files in `dir` named `<seconds>.ppm` or `<seconds>.png`, sorted by
/// timestamp. Other files are ignored.
pub fn list_frame_files(dir: &Path) -> Result<Vec<(u64, PathBuf)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if !matches!(ext.as_deref(), Some("ppm" | "png")) {
            continue;
        }
        if let Some(ts) = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.parse::<u64>().ok())
        {
            files.push((ts, path));
        }
    }
    files.sort();
    files.dedup_by_key(|(ts, _)| *ts);
    Ok(files)
}

/// Indices of the frames kept when sampling every `interval` seconds: the
/// first frame in each window `[t0 + j·interval, t0 + (j+1)·interval)`, where
/// `t0` is the earliest timestamp. `timestamps` must be sorted ascending.
pub fn select_frames(timestamps: &[u64], interval: f64) -> Vec<usize> {
    let Some(&first) = timestamps.first() else {
        return Vec::new();
    };
    let mut picked = Vec::new();
    let mut last_window = None;
    for (i, &t) in timestamps.iter().enumerate() {
        let window = ((t - first) as f64 / interval).floor() as u64;
        if last_window != Some(window) {
            picked.push(i);
            last_window = Some(window);
        }
    }
    picked
}

/// Loads and quantizes one frame every `interval` seconds from `dir`.
pub fn load_frames(dir: &Path, interval: f64, bits: u8) -> Result<FrameSequence> {
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::invalid(format!(
            "sampling interval {interval} must be positive"
        )));
    }
    let files = list_frame_files(dir)?;
    let timestamps: Vec<u64> = files.iter().map(|(t, _)| *t).collect();
    let picked = select_frames(&timestamps, interval);
    if picked.len() < 2 {
        return Err(Error::InsufficientFrames {
            found: picked.len(),
        });
    }

    let frames = picked
        .par_iter()
        .map(|&i| {
            let (ts, path) = &files[i];
            let img = image::open(path).map_err(|e| match e {
                image::ImageError::IoError(source) => Error::io(path, source),
                other => Error::Image {
                    path: path.clone(),
                    message: other.to_string(),
                },
            })?;
            Ok(Frame {
                timestamp: *ts as f64,
                bag: quantize_frame(&img.to_rgb8(), bits)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let video_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    FrameSequence::new(video_id, frames)
}

//! Sparse bag-of-words vectors and the similarity measures shared by frame
//! analysis and text retrieval.
//!
//! Frames and documents are both reduced to a [`TermVector`]: a sparse map from
//! a `u32` term id to a non-negative weight. For frames the term id is a
//! quantized pixel colour and the weight a pixel count; for text the id comes
//! from a vocabulary and the weight is a raw or TF-IDF count.

mod lsi;
mod quantize;
mod tfidf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lsi::{latent_cosine, LsiModel};
pub use quantize::{quantize_frame, quantize_rgb, DEFAULT_BITS};
pub use tfidf::{TfidfIndex, Vocabulary, Weighting};

pub type TermId = u32;

/// Sparse non-negative term weights, sorted by term id with no stored zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TermVector {
    entries: Vec<(TermId, f64)>,
}

impl TermVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from `(term, weight)` pairs. Repeated terms are summed
    /// and zero weights dropped.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TermId, f64)>,
    {
        let mut entries: Vec<(TermId, f64)> = pairs.into_iter().collect();
        if let Some(&(t, w)) = entries.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(format!(
                "weight {w} for term {t} is not a finite non-negative number"
            )));
        }
        entries.sort_by_key(|&(t, _)| t);
        let mut merged: Vec<(TermId, f64)> = Vec::with_capacity(entries.len());
        for (t, w) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == t => *acc += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        Ok(Self { entries: merged })
    }

    /// Counts occurrences of each term id.
    pub fn from_counts<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = TermId>,
    {
        let mut ids: Vec<TermId> = terms.into_iter().collect();
        ids.sort_unstable();
        let mut entries: Vec<(TermId, f64)> = Vec::new();
        for t in ids {
            match entries.last_mut() {
                Some((last, c)) if *last == t => *c += 1.0,
                _ => entries.push((t, 1.0)),
            }
        }
        Self { entries }
    }

    /// Builds from a dense slice, index = term id.
    pub fn from_dense(weights: &[f64]) -> Result<Self> {
        Self::from_pairs(weights.iter().enumerate().map(|(i, &w)| (i as TermId, w)))
    }

    pub fn get(&self, term: TermId) -> f64 {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = TermId> + '_ {
        self.entries.iter().map(|&(t, _)| t)
    }

    /// Number of stored (non-zero) entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        let mut acc = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Multiplies every weight by `factor` (which must be positive).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!(
                "scale factor {factor} must be positive"
            )));
        }
        Ok(Self {
            entries: self.entries.iter().map(|&(t, w)| (t, w * factor)).collect(),
        })
    }

    /// Set view of the bag: every present term gets weight 1.
    pub fn binarized(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|&(t, _)| (t, 1.0)).collect(),
        }
    }
}

/// Extended (Tanimoto) Jaccard: `a·b / (|a|² + |b|² − a·b)`.
pub fn jaccard(a: &TermVector, b: &TermVector) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::UndefinedSimilarity);
    }
    let ab = a.dot(b);
    let denom = a.norm_sq() + b.norm_sq() - ab;
    Ok((ab / denom).clamp(0.0, 1.0))
}

/// Cosine of the angle between two bags. One empty bag yields 0.
pub fn cosine(a: &TermVector, b: &TermVector) -> Result<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Err(Error::UndefinedSimilarity),
        (true, false) | (false, true) => Ok(0.0),
        _ => {
            let ab = a.dot(b);
            // sqrt of the product keeps cos(a, a) at exactly 1.0
            Ok((ab / (a.norm_sq() * b.norm_sq()).sqrt()).clamp(0.0, 1.0))
        }
    }
}

/// Similarity measure used to compare two frames.
#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Jaccard,
    Cosine,
    Lsi,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Jaccard, Algorithm::Cosine, Algorithm::Lsi];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Jaccard => "jaccard",
            Algorithm::Cosine => "cosine",
            Algorithm::Lsi => "lsi",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jaccard" => Ok(Algorithm::Jaccard),
            "cosine" => Ok(Algorithm::Cosine),
            "lsi" => Ok(Algorithm::Lsi),
            other => Err(Error::invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

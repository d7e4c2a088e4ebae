//! Development-screencast detection by frame stability.
//!
//! A video's score is the mean similarity of consecutive sampled frames.
//! Screencasts are mostly static, so they score high; ranking videos by score
//! and cutting the list at `k` is the whole classifier.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::FrameSequence;
use crate::error::{Error, Result};
use crate::vectorspace::{cosine, jaccard, Algorithm, LsiModel, TermVector};

/// Upper bound on latent dimensions when LSI is fitted on a video's frames.
pub const LSI_MAX_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreOptions {
    pub algorithm: Algorithm,
    /// Compare colour sets instead of colour counts (Jaccard/cosine only).
    pub binary: bool,
}

impl From<Algorithm> for ScoreOptions {
    fn from(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            binary: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoScore {
    pub video_id: String,
    pub algorithm: Algorithm,
    pub score: f64,
    pub pair_count: usize,
}

/// Mean of `Sim(fₙ, fₙ₊₁)` over every consecutive pair of frames. Identical
/// neighbours are scored like any other pair. For LSI the model is fitted on
/// this video's frames alone with `k = min(10, rank)`.
pub fn video_similarity(seq: &FrameSequence, opts: impl Into<ScoreOptions>) -> Result<VideoScore> {
    let opts = opts.into();
    if seq.len() < 2 {
        return Err(Error::InsufficientFrames { found: seq.len() });
    }
    let bags: Vec<TermVector> = if opts.binary {
        seq.bags().map(TermVector::binarized).collect()
    } else {
        seq.bags().cloned().collect()
    };

    let pair_sims = pair_similarities(&bags, opts.algorithm)?;
    let pair_count = pair_sims.len();
    Ok(VideoScore {
        video_id: seq.video_id.clone(),
        algorithm: opts.algorithm,
        score: pair_sims.iter().sum::<f64>() / pair_count as f64,
        pair_count,
    })
}

/// Similarity of each frame with its successor. Under LSI a frame that has no
/// component in the kept dimensions is scored 0 against its neighbours, as
/// cosine scores an empty bag.
pub fn pair_similarities(bags: &[TermVector], algorithm: Algorithm) -> Result<Vec<f64>> {
    match algorithm {
        Algorithm::Jaccard => bags.windows(2).map(|w| jaccard(&w[0], &w[1])).collect(),
        Algorithm::Cosine => bags.windows(2).map(|w| cosine(&w[0], &w[1])).collect(),
        Algorithm::Lsi => {
            let model = LsiModel::fit(bags, LSI_MAX_K)?;
            (0..bags.len() - 1)
                .map(|i| match model.similarity(i, i + 1) {
                    Err(Error::UndefinedSimilarity) => Ok(0.0),
                    other => other,
                })
                .collect()
        }
    }
}

/// Scores many videos in parallel; output order follows input order.
pub fn score_videos(seqs: &[FrameSequence], opts: ScoreOptions) -> Result<Vec<VideoScore>> {
    seqs.par_iter().map(|s| video_similarity(s, opts)).collect()
}

/// Video ids by descending score, ties by ascending id.
pub fn rank_videos(scores: &[VideoScore]) -> Result<Vec<String>> {
    if let Some(first) = scores.first() {
        if let Some(other) = scores.iter().find(|s| s.algorithm != first.algorithm) {
            return Err(Error::MixedAlgorithms(
                first.algorithm.to_string(),
                other.algorithm.to_string(),
            ));
        }
    }
    let mut order: Vec<&VideoScore> = scores.iter().collect();
    order.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.video_id.cmp(&b.video_id))
    });
    Ok(order.into_iter().map(|s| s.video_id.clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEvaluation {
    pub k: usize,
    pub retrieved_relevant: usize,
    pub total_relevant: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// The requested cutoff exceeded the ranking length and was lowered.
    pub k_clamped: bool,
}

/// Precision, recall and F1 of the top `k` of a ranking.
pub fn evaluate_ranking(
    ranked: &[String],
    relevant: &HashSet<String>,
    k: usize,
) -> Result<RankingEvaluation> {
    if k == 0 {
        return Err(Error::invalid("cutoff k must be at least 1"));
    }
    if relevant.is_empty() {
        return Err(Error::invalid("relevant set is empty"));
    }
    if ranked.is_empty() {
        return Err(Error::invalid("ranking is empty"));
    }
    let k_clamped = k > ranked.len();
    let k = k.min(ranked.len());
    let hits = ranked[..k]
        .iter()
        .filter(|id| relevant.contains(*id))
        .count();
    let precision = hits as f64 / k as f64;
    let recall = hits as f64 / relevant.len() as f64;
    let f1 = if hits == 0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    if k_clamped {
        log::warn!("cutoff clamped to ranking length {k}");
    }
    Ok(RankingEvaluation {
        k,
        retrieved_relevant: hits,
        total_relevant: relevant.len(),
        precision,
        recall,
        f1,
        k_clamped,
    })
}

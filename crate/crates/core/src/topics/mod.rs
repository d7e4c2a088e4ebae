//! Topic mining over screencast titles and transcripts: preprocessing, LDA,
//! term relevance, the intertopic distance map and the search for a topic
//! count whose clusters do not overlap.

mod intertopic;
mod lda;
mod preprocess;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use intertopic::{classical_mds, intertopic_map, jensen_shannon, IntertopicMap, MAX_RADIUS};
pub use lda::{lda_fit, LdaParams, TopicModel, DEFAULT_BETA, DEFAULT_ITERATIONS};
pub use preprocess::{default_stopwords, is_probable_noun, preprocess_text, PreprocessOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevantTerm {
    pub term: String,
    pub relevance: f64,
}

/// Terms of `topic` ranked by `λ·ln φ(w) + (1−λ)·ln(φ(w)/p(w))`, ties broken
/// by term.
pub fn relevance_terms(
    model: &TopicModel,
    topic: usize,
    lambda: f64,
    top_n: usize,
) -> Result<Vec<RelevantTerm>> {
    let phi = model
        .phi
        .get(topic)
        .ok_or_else(|| Error::invalid(format!("topic {topic} out of range for K = {}", model.k)))?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda {lambda} not in [0, 1]")));
    }
    let mut terms: Vec<RelevantTerm> = phi
        .iter()
        .zip(&model.term_marginal)
        .zip(&model.vocab)
        .map(|((&p, &marginal), term)| RelevantTerm {
            term: term.clone(),
            relevance: lambda * p.ln() + (1.0 - lambda) * (p / marginal).ln(),
        })
        .collect();
    terms.sort_by(|a, b| {
        b.relevance
            .total_cmp(&a.relevance)
            .then_with(|| a.term.cmp(&b.term))
    });
    terms.truncate(top_n);
    Ok(terms)
}

/// Outcome of the topic-count search.
#[derive(Debug, Clone)]
pub struct TunedTopics {
    pub k: usize,
    pub model: TopicModel,
    pub map: IntertopicMap,
    /// No candidate was free of overlap; `k` fell back to 2.
    pub overlap: bool,
    /// `(K, overlapping)` for every candidate, descending K.
    pub candidates: Vec<(usize, bool)>,
}

/// Fits K = `k_max` down to 2 and keeps the largest K whose intertopic map has
/// no overlapping circles. `params.k` is ignored. Candidate fits run in
/// parallel; each uses the same seed, so the outcome does not depend on
/// scheduling.
pub fn tune_topics(
    corpus: &[Vec<String>],
    k_max: usize,
    params: &LdaParams,
) -> Result<TunedTopics> {
    if k_max < 2 {
        return Err(Error::invalid(format!(
            "maximum topic count {k_max} must be at least 2"
        )));
    }
    let fits: Vec<(TopicModel, IntertopicMap)> = (2..=k_max)
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let model = lda_fit(corpus, &LdaParams { k, ..*params })?;
            let map = intertopic_map(&model)?;
            Ok((model, map))
        })
        .collect::<Result<_>>()?;

    let candidates: Vec<(usize, bool)> = fits
        .iter()
        .map(|(m, map)| (m.k, map.has_overlap()))
        .collect();
    let chosen = candidates.iter().position(|&(_, overlap)| !overlap);
    let overlap = chosen.is_none();
    let (model, map) = fits
        .into_iter()
        .nth(chosen.unwrap_or(candidates.len() - 1))
        .expect("at least one candidate");
    Ok(TunedTopics {
        k: model.k,
        model,
        map,
        overlap,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEntry {
    pub topic: usize,
    pub prevalence: f64,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub terms: Vec<RelevantTerm>,
}

/// Everything needed to redraw the intertopic map and term bars elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub k: usize,
    pub overlap: bool,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub candidates: Vec<(usize, bool)>,
    pub topics: Vec<TopicEntry>,
    pub distances: Vec<Vec<f64>>,
}

impl TopicReport {
    pub fn build(tuned: &TunedTopics, lambda: f64, top_n: usize) -> Result<Self> {
        let topics = (0..tuned.k)
            .map(|t| {
                Ok(TopicEntry {
                    topic: t,
                    prevalence: tuned.model.prevalence[t],
                    x: tuned.map.coords[t][0],
                    y: tuned.map.coords[t][1],
                    radius: tuned.map.radii[t],
                    terms: relevance_terms(&tuned.model, t, lambda, top_n)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            k: tuned.k,
            overlap: tuned.overlap,
            lambda,
            alpha: tuned.model.alpha,
            beta: tuned.model.beta,
            candidates: tuned.candidates.clone(),
            topics,
            distances: tuned.map.distances.clone(),
        })
    }
}

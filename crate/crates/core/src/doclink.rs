//! Linking screencast transcripts to API reference documents by TF-IDF
//! cosine, and evaluating the links against relevance judgments.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::vectorspace::{cosine, TfidfIndex};

pub const DEFAULT_TAU: f64 = 0.12;
pub const DEFAULT_KS: [usize; 4] = [3, 5, 10, 20];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
}

/// Full ranking of the corpus for one transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkResult {
    pub screencast_id: String,
    pub ranking: Vec<ScoredDoc>,
    pub top_n: usize,
    pub threshold: f64,
    /// Documents scoring `≥ threshold`.
    pub above_threshold: usize,
}

impl LinkResult {
    pub fn top(&self) -> &[ScoredDoc] {
        &self.ranking[..self.top_n.min(self.ranking.len())]
    }
}

/// Scores every indexed document against the transcript's tokens, weighted
/// with the document corpus' IDF. Scores are non-increasing, ties ordered by
/// document id.
pub fn link_transcript(
    index: &TfidfIndex,
    transcript: &Document,
    top_n: usize,
    tau: f64,
) -> Result<LinkResult> {
    if transcript.tokens.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let query = index.vectorize(&transcript.tokens);
    let mut ranking: Vec<ScoredDoc> = (0..index.num_docs())
        .into_par_iter()
        .map(|i| {
            let doc = index.doc_vector(i);
            let score = if query.is_empty() || doc.is_empty() {
                0.0
            } else {
                cosine(&query, doc).expect("both vectors non-empty")
            };
            ScoredDoc {
                doc_id: index.doc_id(i).to_owned(),
                score,
            }
        })
        .collect();
    ranking.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    let above_threshold = ranking.iter().filter(|d| d.score >= tau).count();
    Ok(LinkResult {
        screencast_id: transcript.id.clone(),
        ranking,
        top_n,
        threshold: tau,
        above_threshold,
    })
}

#[derive(Debug, Clone, Deserialize, Serialize)]
struct JudgmentLine {
    screencast_id: String,
    relevant_doc_ids: Vec<String>,
}

/// Gold relevant documents per screencast.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelevanceJudgments(BTreeMap<String, BTreeSet<String>>);

impl RelevanceJudgments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<I, S>(&mut self, screencast_id: impl Into<String>, docs: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = screencast_id.into();
        let set: BTreeSet<String> = docs.into_iter().map(Into::into).collect();
        if set.is_empty() {
            return Err(Error::invalid(format!(
                "screencast {id:?} has no relevant documents"
            )));
        }
        if self.0.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.0.insert(id, set);
        Ok(())
    }

    pub fn get(&self, screencast_id: &str) -> Option<&BTreeSet<String>> {
        self.0.get(screencast_id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.0.iter()
    }

    pub fn total_relevant(&self) -> usize {
        self.0.values().map(BTreeSet::len).sum()
    }

    /// Parses line-delimited `{"screencast_id": ..., "relevant_doc_ids": [...]}`.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut out = Self::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let j: JudgmentLine = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
            out.insert(j.screencast_id, j.relevant_doc_ids)?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_jsonl(&text)
    }
}

/// One cutoff of the evaluation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub k: usize,
    pub retrieved_relevant_total: usize,
    pub relevant_total: usize,
    /// `k` times the number of screencasts.
    pub retrieved_total: usize,
    /// `"hits/relevant"`, e.g. `"38/65"`.
    pub retrieved: String,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationTable {
    pub screencasts: usize,
    pub rows: Vec<EvaluationRow>,
}

/// Precision and recall at each cutoff, micro-averaged (pooled counts) and
/// macro-averaged (mean of per-screencast ratios). Precision at `k` always
/// divides by `k`, even for rankings shorter than `k`.
pub fn evaluate_links(
    results: &[LinkResult],
    judgments: &RelevanceJudgments,
    ks: &[usize],
) -> Result<EvaluationTable> {
    if results.is_empty() {
        return Err(Error::invalid("no link results to evaluate"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0) {
        return Err(Error::invalid(format!("cutoff {k} must be at least 1")));
    }
    let relevant: Vec<&BTreeSet<String>> = results
        .iter()
        .map(|r| {
            judgments
                .get(&r.screencast_id)
                .ok_or_else(|| Error::MissingJudgment(r.screencast_id.clone()))
        })
        .collect::<Result<_>>()?;
    let relevant_total: usize = relevant.iter().map(|s| s.len()).sum();
    let n = results.len() as f64;

    let rows = ks
        .iter()
        .map(|&k| {
            let hits: Vec<usize> = results
                .iter()
                .zip(&relevant)
                .map(|(r, rel)| {
                    r.ranking
                        .iter()
                        .take(k)
                        .filter(|d| rel.contains(&d.doc_id))
                        .count()
                })
                .collect();
            let hit_total: usize = hits.iter().sum();
            let retrieved_total = k * results.len();
            EvaluationRow {
                k,
                retrieved_relevant_total: hit_total,
                relevant_total,
                retrieved_total,
                retrieved: format!("{hit_total}/{relevant_total}"),
                micro_precision: hit_total as f64 / retrieved_total as f64,
                micro_recall: hit_total as f64 / relevant_total as f64,
                macro_precision: hits.iter().map(|&h| h as f64 / k as f64).sum::<f64>() / n,
                macro_recall: hits
                    .iter()
                    .zip(&relevant)
                    .map(|(&h, rel)| h as f64 / rel.len() as f64)
                    .sum::<f64>()
                    / n,
            }
        })
        .collect();
    Ok(EvaluationTable {
        screencasts: results.len(),
        rows,
    })
}

/// Split of scores around a similarity threshold, kept as exact counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPartition {
    pub tau: f64,
    pub all_below: usize,
    pub all_total: usize,
    pub relevant_above: usize,
    pub relevant_total: usize,
    pub fraction_all_below: f64,
    /// `None` when there are no relevant scores.
    pub fraction_relevant_above: Option<f64>,
}

/// Share of all scores strictly below `tau` and share of relevant scores at or
/// above it.
pub fn threshold_partition(
    all_scores: &[f64],
    relevant_scores: &[f64],
    tau: f64,
) -> Result<ThresholdPartition> {
    if all_scores.is_empty() {
        return Err(Error::invalid("no scores to partition"));
    }
    let all_below = all_scores.iter().filter(|&&s| s < tau).count();
    let relevant_above = relevant_scores.iter().filter(|&&s| s >= tau).count();
    Ok(ThresholdPartition {
        tau,
        all_below,
        all_total: all_scores.len(),
        relevant_above,
        relevant_total: relevant_scores.len(),
        fraction_all_below: all_below as f64 / all_scores.len() as f64,
        fraction_relevant_above: (!relevant_scores.is_empty())
            .then(|| relevant_above as f64 / relevant_scores.len() as f64),
    })
}

/// Pools every score of every result, and the scores of judged-relevant
/// documents, for [`threshold_partition`].
pub fn pooled_scores(
    results: &[LinkResult],
    judgments: &RelevanceJudgments,
) -> (Vec<f64>, Vec<f64>) {
    let mut all = Vec::new();
    let mut relevant = Vec::new();
    for r in results {
        let rel = judgments.get(&r.screencast_id);
        for d in &r.ranking {
            all.push(d.score);
            if rel.is_some_and(|s| s.contains(&d.doc_id)) {
                relevant.push(d.score);
            }
        }
    }
    (all, relevant)
}

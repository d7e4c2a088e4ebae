use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub k: usize,
    /// Symmetric document-topic prior; `None` means `50 / K`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            alpha: None,
            beta: DEFAULT_BETA,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
        }
    }

    pub fn resolved_alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }
}

/// A fitted LDA model. `phi` is K × V, `theta` is D × K over the documents
/// that survived fitting (see `doc_index`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub vocab: Vec<String>,
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    /// Corpus frequency of each vocabulary term.
    pub term_marginal: Vec<f64>,
    /// Token-weighted share of each topic.
    pub prevalence: Vec<f64>,
    /// Position in the input corpus of each row of `theta`.
    pub doc_index: Vec<usize>,
}

impl TopicModel {
    pub fn num_topics(&self) -> usize {
        self.k
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }
}

/// Collapsed Gibbs sampling. Empty documents are dropped with a warning.
/// The result depends only on `corpus` and `params`.
pub fn lda_fit(corpus: &[Vec<String>], params: &LdaParams) -> Result<TopicModel> {
    let k = params.k;
    if k == 0 {
        return Err(Error::invalid("number of topics must be at least 1"));
    }
    let alpha = params.resolved_alpha();
    let beta = params.beta;
    if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!(
            "priors must be positive (alpha {alpha}, beta {beta})"
        )));
    }

    let doc_index: Vec<usize> = corpus
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_empty())
        .map(|(i, _)| i)
        .collect();
    if doc_index.len() < corpus.len() {
        log::warn!("dropped {} empty documents", corpus.len() - doc_index.len());
    }
    if doc_index.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let vocab: Vec<String> = doc_index
        .iter()
        .flat_map(|&d| corpus[d].iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let word_id: BTreeMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    let docs: Vec<Vec<usize>> = doc_index
        .iter()
        .map(|&d| corpus[d].iter().map(|w| word_id[w.as_str()]).collect())
        .collect();
    let total_tokens: usize = docs.iter().map(Vec::len).sum();
    if k > total_tokens {
        return Err(Error::invalid(format!(
            "{k} topics exceed the {total_tokens} tokens in the corpus"
        )));
    }

    let v = vocab.len();
    let mut sampler = Gibbs::new(&docs, k, v, alpha, beta, params.seed);
    for _ in 0..params.iterations {
        sampler.sweep(&docs);
    }

    let v_beta = v as f64 * beta;
    let phi: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            let denom = sampler.topic_total[t] as f64 + v_beta;
            (0..v)
                .map(|w| (sampler.word_topic[w * k + t] as f64 + beta) / denom)
                .collect()
        })
        .collect();
    let k_alpha = k as f64 * alpha;
    let theta: Vec<Vec<f64>> = docs
        .iter()
        .enumerate()
        .map(|(d, words)| {
            let denom = words.len() as f64 + k_alpha;
            (0..k)
                .map(|t| (sampler.doc_topic[d * k + t] as f64 + alpha) / denom)
                .collect()
        })
        .collect();

    let n = total_tokens as f64;
    let mut term_marginal = vec![0.0; v];
    for &w in docs.iter().flatten() {
        term_marginal[w] += 1.0;
    }
    term_marginal.iter_mut().for_each(|p| *p /= n);

    let mut prevalence = vec![0.0; k];
    for (row, words) in theta.iter().zip(&docs) {
        for (p, &th) in prevalence.iter_mut().zip(row) {
            *p += th * words.len() as f64;
        }
    }
    prevalence.iter_mut().for_each(|p| *p /= n);

    Ok(TopicModel {
        k,
        alpha,
        beta,
        iterations: params.iterations,
        seed: params.seed,
        vocab,
        phi,
        theta,
        term_marginal,
        prevalence,
        doc_index,
    })
}

struct Gibbs {
    k: usize,
    alpha: f64,
    beta: f64,
    v_beta: f64,
    rng: ChaCha8Rng,
    assignments: Vec<Vec<usize>>,
    // doc-major D × K
    doc_topic: Vec<u32>,
    // word-major V × K
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
    weights: Vec<f64>,
}

impl Gibbs {
    fn new(docs: &[Vec<usize>], k: usize, v: usize, alpha: f64, beta: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut doc_topic = vec![0u32; docs.len() * k];
        let mut word_topic = vec![0u32; v * k];
        let mut topic_total = vec![0u32; k];
        let assignments = docs
            .iter()
            .enumerate()
            .map(|(d, words)| {
                words
                    .iter()
                    .map(|&w| {
                        let t = rng.random_range(0..k);
                        doc_topic[d * k + t] += 1;
                        word_topic[w * k + t] += 1;
                        topic_total[t] += 1;
                        t
                    })
                    .collect()
            })
            .collect();
        Self {
            k,
            alpha,
            beta,
            v_beta: v as f64 * beta,
            rng,
            assignments,
            doc_topic,
            word_topic,
            topic_total,
            weights: vec![0.0; k],
        }
    }

    fn sweep(&mut self, docs: &[Vec<usize>]) {
        let k = self.k;
        for (d, words) in docs.iter().enumerate() {
            let dt = d * k;
            for (i, &w) in words.iter().enumerate() {
                let wt = w * k;
                let old = self.assignments[d][i];
                self.doc_topic[dt + old] -= 1;
                self.word_topic[wt + old] -= 1;
                self.topic_total[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    total += (self.doc_topic[dt + t] as f64 + self.alpha)
                        * (self.word_topic[wt + t] as f64 + self.beta)
                        / (self.topic_total[t] as f64 + self.v_beta);
                    self.weights[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.assignments[d][i] = new;
                self.doc_topic[dt + new] += 1;
                self.word_topic[wt + new] += 1;
                self.topic_total[new] += 1;
            }
        }
    }
}

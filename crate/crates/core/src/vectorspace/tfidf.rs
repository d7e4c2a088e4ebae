use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{TermId, TermVector};
use crate::corpus::Document;
use crate::error::{Error, Result};

/// String ↔ id mapping. Ids are assigned in order of first appearance.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    ids: HashMap<String, TermId>,
    terms: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: &str) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as TermId;
        self.ids.insert(term.to_owned(), id);
        self.terms.push(term.to_owned());
        id
    }

    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// `tf · ln(N / df)`
    #[default]
    TfIdf,
    /// Raw term counts.
    RawCount,
}

/// Weighted document vectors over a fixed corpus.
#[derive(Debug, Clone)]
pub struct TfidfIndex {
    vocab: Vocabulary,
    df: Vec<usize>,
    doc_ids: Vec<String>,
    vectors: Vec<TermVector>,
    weighting: Weighting,
}

impl TfidfIndex {
    pub fn build(docs: &[Document], weighting: Weighting) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut vocab = Vocabulary::new();
        let counts: Vec<TermVector> = docs
            .iter()
            .map(|d| TermVector::from_counts(d.tokens.iter().map(|t| vocab.intern(t))))
            .collect();
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }

        let mut df = vec![0usize; vocab.len()];
        for bag in &counts {
            for t in bag.terms() {
                df[t as usize] += 1;
            }
        }

        let mut index = Self {
            vocab,
            df,
            doc_ids: docs.iter().map(|d| d.id.clone()).collect(),
            vectors: Vec::new(),
            weighting,
        };
        index.vectors = counts.iter().map(|bag| index.weigh(bag)).collect();
        Ok(index)
    }

    fn weigh(&self, counts: &TermVector) -> TermVector {
        match self.weighting {
            Weighting::RawCount => counts.clone(),
            Weighting::TfIdf => {
                TermVector::from_pairs(counts.iter().map(|(t, tf)| (t, tf * self.idf_by_id(t))))
                    .expect("tf-idf weights are non-negative")
            }
        }
    }

    fn idf_by_id(&self, t: TermId) -> f64 {
        (self.num_docs() as f64 / self.df[t as usize] as f64).ln()
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn df(&self, term: &str) -> usize {
        self.vocab.id(term).map_or(0, |t| self.df[t as usize])
    }

    /// `ln(N / df)`, or `None` for terms outside the corpus.
    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocab.id(term).map(|t| self.idf_by_id(t))
    }

    pub fn doc_id(&self, i: usize) -> &str {
        &self.doc_ids[i]
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_vector(&self, i: usize) -> &TermVector {
        &self.vectors[i]
    }

    /// Stored weight of `term` in document `i`.
    pub fn weight(&self, term: &str, i: usize) -> f64 {
        self.vocab.id(term).map_or(0.0, |t| self.vectors[i].get(t))
    }

    /// Weighs a token list with this corpus' document frequencies. Tokens the
    /// corpus has never seen carry no IDF and are dropped.
    pub fn vectorize(&self, tokens: &[String]) -> TermVector {
        let counts = TermVector::from_counts(tokens.iter().filter_map(|t| self.vocab.id(t)));
        self.weigh(&counts)
    }
}

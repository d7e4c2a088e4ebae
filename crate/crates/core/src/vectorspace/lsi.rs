use faer::Mat;

use super::{TermId, TermVector};
use crate::error::{Error, Result};

/// Truncated SVD of a term × column count matrix.
///
/// With `A = U Σ Vᵀ`, column `j` is represented by row `j` of `V_k Σ_k`, so
/// inner products between latent vectors approximate inner products between
/// the original columns and are exact when `k` equals the rank.
#[derive(Debug, Clone)]
pub struct LsiModel {
    k: usize,
    rank: usize,
    terms: Vec<TermId>,
    // terms.len() × k
    term_basis: Mat<f64>,
    singular_values: Vec<f64>,
    latent: Vec<Vec<f64>>,
    // below this a singular value or latent norm is rounding noise
    tol: f64,
}

impl LsiModel {
    /// Fits on `columns`, keeping `k` latent dimensions (clamped to the
    /// numerical rank of the matrix).
    pub fn fit(columns: &[TermVector], k: usize) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::invalid(format!(
                "LSI needs at least 2 columns, got {}",
                columns.len()
            )));
        }
        if k == 0 {
            return Err(Error::invalid("LSI dimension k must be at least 1"));
        }

        let mut terms: Vec<TermId> = columns.iter().flat_map(|c| c.terms()).collect();
        terms.sort_unstable();
        terms.dedup();
        if terms.is_empty() {
            return Err(Error::DegenerateMatrix);
        }

        let (rows, cols) = (terms.len(), columns.len());
        let mut matrix = Mat::<f64>::zeros(rows, cols);
        for (j, column) in columns.iter().enumerate() {
            for (t, w) in column.iter() {
                let i = terms.binary_search(&t).expect("term collected above");
                matrix[(i, j)] = w;
            }
        }

        // singular values come back non-increasing
        let svd = matrix.thin_svd().map_err(|_| Error::DegenerateMatrix)?;
        let (u, v) = (svd.U(), svd.V());
        let sigma = svd.S().column_vector();
        let order: Vec<usize> = (0..sigma.nrows()).collect();

        let sigma_max = sigma[order[0]];
        if sigma_max <= 0.0 {
            return Err(Error::DegenerateMatrix);
        }
        let tol = sigma_max * rows.max(cols) as f64 * f64::EPSILON;
        let rank = order.iter().filter(|&&i| sigma[i] > tol).count();
        let k = k.min(rank);
        let kept = &order[..k];

        let singular_values: Vec<f64> = kept.iter().map(|&i| sigma[i]).collect();
        let term_basis = Mat::from_fn(rows, k, |r, c| u[(r, kept[c])]);
        let latent = (0..cols)
            .map(|j| kept.iter().map(|&i| sigma[i] * v[(j, i)]).collect())
            .collect();

        Ok(Self {
            k,
            rank,
            terms,
            term_basis,
            singular_values,
            latent,
            tol,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Numerical rank of the fitted matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Kept singular values, non-increasing.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn num_columns(&self) -> usize {
        self.latent.len()
    }

    pub fn latent(&self, column: usize) -> Option<&[f64]> {
        self.latent.get(column).map(Vec::as_slice)
    }

    /// Folds an arbitrary bag into the latent space (`U_kᵀ q`). Terms not seen
    /// during fitting are ignored. For a fitted column this reproduces its
    /// latent vector.
    pub fn project(&self, bag: &TermVector) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for (t, w) in bag.iter() {
            if let Ok(r) = self.terms.binary_search(&t) {
                for (c, o) in out.iter_mut().enumerate() {
                    *o += self.term_basis[(r, c)] * w;
                }
            }
        }
        out
    }

    /// Cosine of the latent vectors of two fitted columns, in `[-1, 1]`. A
    /// column orthogonal to the kept dimensions has no direction there and
    /// gives [`Error::UndefinedSimilarity`].
    pub fn similarity(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.latent.len();
        let (a, b) = match (self.latent(i), self.latent(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::invalid(format!(
                    "column index out of range ({i}, {j}) for {n} fitted columns"
                )))
            }
        };
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm(a) <= self.tol || norm(b) <= self.tol {
            return Err(Error::UndefinedSimilarity);
        }
        latent_cosine(a, b)
    }
}

/// Cosine of two signed latent vectors, clamped to `[-1, 1]`.
pub fn latent_cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if let ([x], [y]) = (a, b) {
        return match x * y {
            p if p > 0.0 => Ok(1.0),
            p if p < 0.0 => Ok(-1.0),
            _ => Err(Error::UndefinedSimilarity),
        };
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedSimilarity);
    }
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::TopicModel;
use crate::error::{Error, Result};

/// Radius of the most prevalent topic's circle, in map units.
pub const MAX_RADIUS: f64 = 0.25;

/// Jensen-Shannon divergence in nats, `0 ≤ JSD ≤ ln 2`.
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    let mut kl_p = 0.0;
    let mut kl_q = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            kl_p += a * (a / m).ln();
        }
        if b > 0.0 {
            kl_q += b * (b / m).ln();
        }
    }
    (0.5 * kl_p + 0.5 * kl_q).clamp(0.0, std::f64::consts::LN_2)
}

/// Classical (Torgerson) scaling of a distance matrix into `dims` dimensions.
/// Each axis is oriented so that its largest-magnitude coordinate is positive.
pub fn classical_mds(distances: &[Vec<f64>], dims: usize) -> Vec<Vec<f64>> {
    let n = distances.len();
    if n == 0 {
        return Vec::new();
    }
    let d2: Vec<Vec<f64>> = distances
        .iter()
        .map(|r| r.iter().map(|d| d * d).collect())
        .collect();
    let row_means: Vec<f64> = d2
        .iter()
        .map(|r| r.iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = Mat::from_fn(n, n, |i, j| {
        -0.5 * (d2[i][j] - row_means[i] - row_means[j] + grand)
    });

    let Ok(eig) = b.self_adjoint_eigen(Side::Lower) else {
        return vec![vec![0.0; dims]; n];
    };
    let (values, vectors) = (eig.S().column_vector(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut coords = vec![vec![0.0; dims]; n];
    for (axis, &e) in order.iter().take(dims).enumerate() {
        let scale = values[e].max(0.0).sqrt();
        let col = vectors.col(e);
        let pivot = (0..n)
            .max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs()).then(b.cmp(&a)))
            .unwrap();
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (i, c) in coords.iter_mut().enumerate() {
            c[axis] = sign * col[i] * scale;
        }
    }
    coords
}

/// 2-D layout of topics: points from scaling `√JSD` between topic-term
/// distributions, circles with area proportional to prevalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertopicMap {
    pub coords: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    /// `√JSD` between topic pairs.
    pub distances: Vec<Vec<f64>>,
}

impl IntertopicMap {
    pub fn num_topics(&self) -> usize {
        self.coords.len()
    }

    pub fn center_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// Pairs of topics whose circles intersect.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_topics();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.center_distance(i, j) < self.radii[i] + self.radii[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn has_overlap(&self) -> bool {
        !self.overlapping_pairs().is_empty()
    }
}

pub fn intertopic_map(model: &TopicModel) -> Result<IntertopicMap> {
    let k = model.k;
    if k < 2 {
        return Err(Error::invalid("an intertopic map needs at least 2 topics"));
    }
    // evaluated in (lower, higher) order so the matrix is exactly symmetric
    let distances: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => 0.0,
                    _ => jensen_shannon(&model.phi[i.min(j)], &model.phi[i.max(j)]).sqrt(),
                })
                .collect()
        })
        .collect();
    let coords = classical_mds(&distances, 2)
        .into_iter()
        .map(|c| [c[0], c[1]])
        .collect();

    let max_prev = model.prevalence.iter().cloned().fold(0.0, f64::max);
    let radii = model
        .prevalence
        .iter()
        .map(|&p| MAX_RADIUS * (p / max_prev).sqrt())
        .collect();

    Ok(IntertopicMap {
        coords,
        radii,
        distances,
    })
}

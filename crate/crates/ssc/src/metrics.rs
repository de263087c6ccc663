//! Evaluation: clustering error via optimal label matching, per-cluster
//! algebraic connectivity, and the subspace detection property percentage.

use crate::numerics::{sym_eigen, Matrix};
use crate::selfrep::SparseColumn;
use thiserror::Error;

/// Degrees are floored at this before forming D^{-1/2}, so isolated
/// vertices do not produce infinities.
pub const DEGREE_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: predicted {pred} vs truth {truth}")]
    LengthMismatch { pred: usize, truth: usize },
}

/// One run's worth of evaluation output.
#[derive(Debug, Clone)]
pub struct MetricsRecord {
    pub error_rate: f64,
    /// lambda_2 of each ground-truth cluster's induced subgraph, by label.
    pub connectivity: Vec<f64>,
    pub mean_connectivity: f64,
    pub sdp_percentage: f64,
    pub inner_products: u64,
    pub wall_time: f64,
}

/// Symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2}.
pub fn normalized_laplacian(a: &Matrix) -> Matrix {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let deg: f64 = (0..n).map(|j| a.get(i, j)).sum();
            1.0 / deg.max(DEGREE_FLOOR).sqrt()
        })
        .collect();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = -inv_sqrt_deg[i] * a.get(i, j) * inv_sqrt_deg[j];
            l.set(i, j, if i == j { 1.0 + v } else { v });
        }
    }
    // enforce exact symmetry against rounding in the degree products
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (l.get(i, j) + l.get(j, i));
            l.set(i, j, s);
            l.set(j, i, s);
        }
    }
    l
}

/// Fraction of points misclustered under the best matching of predicted to
/// ground-truth labels (optimal assignment on the confusion matrix).
pub fn clustering_error(pred: &[usize], truth: &[usize]) -> Result<f64, MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let n = pred.len();
    if n == 0 {
        return Ok(0.0);
    }
    let k = pred.iter().max().unwrap() + 1;
    let l = truth.iter().max().unwrap() + 1;
    let side = k.max(l);
    let mut agree = vec![vec![0i64; side]; side];
    for (&p, &t) in pred.iter().zip(truth) {
        agree[p][t] += 1;
    }
    let matched = max_assignment(&agree);
    Ok(1.0 - matched as f64 / n as f64)
}

/// Maximum-total assignment on a square score matrix (Hungarian method with
/// potentials, O(n^3)).
fn max_assignment(score: &[Vec<i64>]) -> i64 {
    let n = score.len();
    let big = score
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0);
    // minimize cost = big - score
    let cost: Vec<Vec<i64>> = score
        .iter()
        .map(|row| row.iter().map(|&s| big - s).collect())
        .collect();

    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut assignment = vec![0usize; n + 1]; // column -> row (1-based)
    for i in 1..=n {
        assignment[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut way = vec![0usize; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = assignment[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[assignment[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assignment[j0] == 0 {
                break;
            }
        }
        // augment along the alternating path
        while j0 != 0 {
            let j1 = way[j0];
            assignment[j0] = assignment[j1];
            j0 = j1;
        }
    }
    let mut total = 0i64;
    for j in 1..=n {
        if assignment[j] != 0 {
            total += score[assignment[j] - 1][j - 1];
        }
    }
    total
}

/// lambda_2 of the normalized Laplacian of each truth cluster's induced
/// subgraph, in label order. Singleton clusters report 0.
pub fn connectivity(a: &Matrix, truth: &[usize]) -> Vec<f64> {
    let n = truth.len();
    debug_assert_eq!(a.rows(), n);
    let num_clusters = truth.iter().max().map(|m| m + 1).unwrap_or(0);
    let mut out = Vec::with_capacity(num_clusters);
    for ell in 0..num_clusters {
        let members: Vec<usize> = (0..n).filter(|&i| truth[i] == ell).collect();
        if members.len() <= 1 {
            out.push(0.0);
            continue;
        }
        let m = members.len();
        let mut sub = Matrix::zeros(m, m);
        for (a_i, &gi) in members.iter().enumerate() {
            for (a_j, &gj) in members.iter().enumerate() {
                sub.set(a_i, a_j, a.get(gi, gj));
            }
        }
        let lap = normalized_laplacian(&sub);
        let eig = sym_eigen(&lap).expect("laplacian is symmetric by construction");
        out.push(eig.eigenvalues[1]);
    }
    out
}

/// Percentage of points whose representation is nontrivial and supported
/// only on same-subspace points, judging entries above `magnitude_threshold`.
pub fn sdp_percentage(
    columns: &[SparseColumn],
    truth: &[usize],
    magnitude_threshold: f64,
) -> f64 {
    debug_assert!(magnitude_threshold >= 0.0);
    let n = columns.len();
    if n == 0 {
        return 0.0;
    }
    let mut satisfied = 0usize;
    for (i, c) in columns.iter().enumerate() {
        let mut nontrivial = false;
        let mut pure = true;
        for (&j, &v) in c.indices.iter().zip(&c.values) {
            if v.abs() > magnitude_threshold {
                nontrivial = true;
                if truth[j] != truth[i] {
                    pure = false;
                    break;
                }
            }
        }
        if nontrivial && pure {
            satisfied += 1;
        }
    }
    100.0 * satisfied as f64 / n as f64
}

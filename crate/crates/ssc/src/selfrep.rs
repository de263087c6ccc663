//! Sparse self-representation solvers: masked OMP with a fixed iteration
//! budget, the residual-shift active update, probabilistic dictionary
//! dropping, and a coordinate-descent LASSO baseline. All instrumented with
//! an inner-product counter.

use crate::numerics::{axpy, dot, norm2, IncrementalQr, Matrix};
use rand::Rng;

/// Residual norm below which a representation is treated as exact and the
/// pursuit stops early.
pub const EXACT_RESIDUAL_TOL: f64 = 1e-10;

/// Relative magnitude below which a LASSO coefficient counts as numerical
/// dust rather than support.
pub const LASSO_SUPPORT_REL_TOL: f64 = 1e-6;

const DEGENERATE_UPDATE_TOL: f64 = 1e-12;

/// Active-index set over the dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryMask {
    active: Vec<bool>,
}

impl DictionaryMask {
    pub fn new_full(n: usize) -> Self {
        Self {
            active: vec![true; n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.active.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    #[inline]
    pub fn is_active(&self, j: usize) -> bool {
        self.active[j]
    }

    pub fn deactivate(&mut self, j: usize) {
        self.active[j] = false;
    }

    /// Number of usable atoms for point `i` (active indices other than `i`).
    pub fn active_excluding(&self, i: usize) -> usize {
        self.active
            .iter()
            .enumerate()
            .filter(|&(j, &a)| a && j != i)
            .count()
    }
}

/// One sparse coefficient column c_i. The owning index never appears in the
/// support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumn {
    pub len: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// All-zero column returned because no atoms were available (or the
    /// solver produced an empty support).
    pub trivial: bool,
}

impl SparseColumn {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            indices: Vec::new(),
            values: Vec::new(),
            trivial: true,
        }
    }

    pub fn support_size(&self) -> usize {
        self.indices.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len];
        for (&j, &c) in self.indices.iter().zip(&self.values) {
            v[j] = c;
        }
        v
    }
}

/// Operation-count instrumentation; both fields only ever grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub inner_products: u64,
    pub flops_estimate: u64,
}

impl OpCounter {
    fn count_inner_products(&mut self, count: u64, dim: u64) {
        self.inner_products += count;
        self.flops_estimate += count * 2 * dim;
    }
}

/// Greedy pursuit of `d` atoms for `x_i` over the active dictionary.
///
/// Each iteration scores every active atom (except `i`) by the absolute
/// inner product with the current residual, picks the best unselected one
/// (ties to the smallest index), and re-projects `x_i` onto the selected
/// span. Returns an all-zero flagged column when no atom is available.
pub fn omp_represent(
    x_i: &[f64],
    x: &Matrix,
    i: usize,
    mask: &DictionaryMask,
    d: usize,
    counter: &mut OpCounter,
) -> SparseColumn {
    let n = x.cols();
    let dim = x.rows();
    assert_eq!(x_i.len(), dim);
    assert_eq!(mask.len(), n);
    assert!(d >= 1);

    let candidates: Vec<usize> = (0..n).filter(|&j| j != i && mask.is_active(j)).collect();
    if candidates.is_empty() {
        return SparseColumn::empty(n);
    }

    let iters = d.min(candidates.len());
    let mut qr = IncrementalQr::new(dim);
    let mut selected: Vec<usize> = Vec::with_capacity(iters);
    let mut residual = x_i.to_vec();

    for _ in 0..iters {
        if norm2(&residual) < EXACT_RESIDUAL_TOL {
            break;
        }
        counter.count_inner_products(candidates.len() as u64, dim as u64);
        let mut best: Option<(usize, f64)> = None;
        for &j in &candidates {
            let score = dot(x.col(j), &residual).abs();
            if selected.contains(&j) {
                continue;
            }
            match best {
                Some((_, b)) if score <= b => {}
                _ => best = Some((j, score)),
            }
        }
        let Some((pick, _)) = best else { break };
        if !qr.push(x.col(pick)) {
            // dependent atom adds nothing; the residual cannot shrink further
            break;
        }
        selected.push(pick);
        residual = qr.project_residual(x_i);
    }

    if selected.is_empty() {
        return SparseColumn::empty(n);
    }
    // map QR coefficients (ordered by selection) back to atom indices
    let mut coeffs = vec![0.0; n];
    let sol = qr.solve(x_i);
    for (&j, &c) in selected.iter().zip(&sol) {
        coeffs[j] = c;
    }
    let mut indices: Vec<usize> = selected.clone();
    indices.sort_unstable();
    let values: Vec<f64> = indices.iter().map(|&j| coeffs[j]).collect();
    SparseColumn {
        len: n,
        indices,
        values,
        trivial: false,
    }
}

/// r_i = x_i - X c_i, touching only the support entries.
pub fn residual(x_i: &[f64], x: &Matrix, c_i: &SparseColumn) -> Vec<f64> {
    let mut r = x_i.to_vec();
    for (&j, &c) in c_i.indices.iter().zip(&c_i.values) {
        axpy(-c, x.col(j), &mut r);
    }
    r
}

/// Result of the residual-shift update.
#[derive(Debug, Clone)]
pub struct UpdatedPoint {
    pub point: Vec<f64>,
    /// Shift collapsed the point (norm below 1e-12); the original point was
    /// returned unchanged.
    pub degenerate: bool,
}

/// x_i' = (x_i + b r_i) / ||x_i + b r_i||.
pub fn active_update(x_i: &[f64], r_i: &[f64], b: f64) -> UpdatedPoint {
    let mut p = x_i.to_vec();
    axpy(b, r_i, &mut p);
    let n = norm2(&p);
    if n <= DEGENERATE_UPDATE_TOL {
        return UpdatedPoint {
            point: x_i.to_vec(),
            degenerate: true,
        };
    }
    for v in p.iter_mut() {
        *v /= n;
    }
    UpdatedPoint {
        point: p,
        degenerate: false,
    }
}

/// Deactivate index `i` with probability `p`, consuming one draw from the
/// stream either way so the stream position does not depend on `p`.
pub fn maybe_drop<R: Rng>(mask: &DictionaryMask, i: usize, p: f64, rng: &mut R) -> DictionaryMask {
    assert!((0.0..=1.0).contains(&p));
    let u: f64 = rng.gen();
    let mut out = mask.clone();
    if u < p {
        out.deactivate(i);
    }
    out
}

/// Outcome of the coordinate-descent LASSO solve.
#[derive(Debug, Clone)]
pub struct LassoSolution {
    pub column: SparseColumn,
    pub converged: bool,
    pub sweeps: usize,
}

const LASSO_COORD_TOL: f64 = 1e-7;
const LASSO_KKT_TOL: f64 = 1e-7;
const LASSO_MAX_SWEEPS: usize = 10_000;

/// Coordinate descent for min ||c||_1 + (lambda/2) ||x_i - X c||_2^2 with
/// c_ii pinned to zero. The returned column keeps every exact nonzero;
/// judging which entries count as structural support (vs numerical dust) is
/// the caller's job via [`LASSO_SUPPORT_REL_TOL`].
pub fn lasso_represent(x_i: &[f64], x: &Matrix, i: usize, lambda: f64) -> LassoSolution {
    assert!(lambda > 0.0);
    let n = x.cols();
    let dim = x.rows();
    assert_eq!(x_i.len(), dim);

    let atom_sq: Vec<f64> = (0..n).map(|j| dot(x.col(j), x.col(j))).collect();
    let mut c = vec![0.0; n];
    let mut r = x_i.to_vec();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < LASSO_MAX_SWEEPS {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for j in 0..n {
            if j == i || atom_sq[j] <= 0.0 {
                continue;
            }
            let old = c[j];
            // correlation with the partial residual excluding coordinate j
            let rho = dot(x.col(j), &r) + old * atom_sq[j];
            let thresh = 1.0 / lambda;
            let new = if rho.abs() <= thresh {
                0.0
            } else {
                (rho - rho.signum() * thresh) / atom_sq[j]
            };
            if new != old {
                axpy(old - new, x.col(j), &mut r);
                c[j] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        if max_change < LASSO_COORD_TOL {
            // refresh the residual (incremental updates drift) and confirm
            // stationarity before declaring convergence; a small coordinate
            // step does not bound the subgradient when lambda is large
            r = x_i.to_vec();
            for (j, &cj) in c.iter().enumerate() {
                if cj != 0.0 {
                    axpy(-cj, x.col(j), &mut r);
                }
            }
            let mut violation = 0.0f64;
            for j in 0..n {
                if j == i || atom_sq[j] <= 0.0 {
                    continue;
                }
                let grad = lambda * dot(x.col(j), &r);
                let v = if c[j] != 0.0 {
                    (grad - c[j].signum()).abs()
                } else {
                    (grad.abs() - 1.0).max(0.0)
                };
                violation = violation.max(v);
            }
            if violation <= LASSO_KKT_TOL {
                converged = true;
                break;
            }
        }
    }

    let mut indices = Vec::new();
    let mut values = Vec::new();
    for (j, &v) in c.iter().enumerate() {
        if v != 0.0 {
            indices.push(j);
            values.push(v);
        }
    }
    let trivial = indices.is_empty();
    LassoSolution {
        column: SparseColumn {
            len: n,
            indices,
            values,
            trivial,
        },
        converged,
        sweeps,
    }
}

/// Data-driven default penalty lambda = alpha / max_{j != i} |<x_i, x_j>|.
pub fn default_lambda(x_i: &[f64], x: &Matrix, i: usize, alpha: f64) -> f64 {
    let mut mu = 0.0f64;
    for j in 0..x.cols() {
        if j != i {
            mu = mu.max(dot(x_i, x.col(j)).abs());
        }
    }
    if mu <= 0.0 {
        alpha / 1e-12
    } else {
        alpha / mu
    }
}

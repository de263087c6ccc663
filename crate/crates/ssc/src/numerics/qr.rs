//! Incremental thin QR via modified Gram-Schmidt with reorthogonalization.
//!
//! OMP adds one atom per iteration; pushing a column costs O(D k) and the
//! triangular solve O(k^2), so a d-iteration pursuit stays O(D d^2) per point.

use super::{axpy, dot, norm2, Matrix, NumericsError};

/// A new atom is declared dependent when its component orthogonal to the
/// current basis has norm below this.
pub const PIVOT_TOL: f64 = 1e-10;

/// Thin QR factorization grown one column at a time.
#[derive(Debug, Clone)]
pub struct IncrementalQr {
    dim: usize,
    /// Orthonormal columns.
    q: Vec<Vec<f64>>,
    /// For every pushed atom: its coefficients against `q` (length = q-count
    /// at push time, plus the diagonal entry when independent).
    r_cols: Vec<Vec<f64>>,
    /// For every pushed atom: index into `q`, or None when dependent.
    pivot: Vec<Option<usize>>,
}

impl IncrementalQr {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            q: Vec::new(),
            r_cols: Vec::new(),
            pivot: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    pub fn pushed(&self) -> usize {
        self.r_cols.len()
    }

    /// Orthogonalize `atom` against the current basis and append it.
    /// Returns false when the atom is numerically dependent (no new basis
    /// direction; its coefficient will be pinned to zero by `solve`).
    pub fn push(&mut self, atom: &[f64]) -> bool {
        assert_eq!(atom.len(), self.dim);
        let mut v = atom.to_vec();
        let mut r = vec![0.0; self.q.len()];
        // two Gram-Schmidt passes; the second mops up cancellation
        for _ in 0..2 {
            for (k, qk) in self.q.iter().enumerate() {
                let h = dot(qk, &v);
                r[k] += h;
                axpy(-h, qk, &mut v);
            }
        }
        let nv = norm2(&v);
        let scale = norm2(atom).max(1.0);
        if nv < PIVOT_TOL * scale {
            self.pivot.push(None);
            self.r_cols.push(r);
            return false;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        r.push(nv);
        self.pivot.push(Some(self.q.len()));
        self.q.push(v);
        self.r_cols.push(r);
        true
    }

    /// The k-th orthonormal basis column.
    pub fn basis_column(&self, k: usize) -> &[f64] {
        &self.q[k]
    }

    /// Residual of `target` after projection onto the span of the basis.
    pub fn project_residual(&self, target: &[f64]) -> Vec<f64> {
        let mut r = target.to_vec();
        for _ in 0..2 {
            for qk in &self.q {
                let h = dot(qk, &r);
                axpy(-h, qk, &mut r);
            }
        }
        r
    }

    /// Least-squares coefficients for all pushed atoms; dependent atoms get 0.
    pub fn solve(&self, target: &[f64]) -> Vec<f64> {
        let rank = self.q.len();
        // b = Q^T target
        let mut b: Vec<f64> = self.q.iter().map(|qk| dot(qk, target)).collect();
        // back-substitute through the independent columns only
        let mut coeffs = vec![0.0; self.r_cols.len()];
        let indep: Vec<usize> = (0..self.r_cols.len())
            .filter(|&t| self.pivot[t].is_some())
            .collect();
        debug_assert_eq!(indep.len(), rank);
        for (k, &t) in indep.iter().enumerate().rev() {
            let rc = &self.r_cols[t];
            let c = b[k] / rc[k];
            coeffs[t] = c;
            for (kk, item) in b.iter_mut().enumerate().take(k) {
                *item -= c * rc[kk];
            }
        }
        coeffs
    }
}

/// Result of projecting a target onto the span of a basis.
#[derive(Debug, Clone)]
pub struct Projection {
    pub coeffs: Vec<f64>,
    pub residual: Vec<f64>,
    /// True when the basis was numerically rank-deficient; dependent columns
    /// received a zero coefficient (pivoted fallback solution).
    pub rank_deficient: bool,
}

/// Least-squares projection of `target` onto the column span of `basis`.
pub fn least_squares_project(target: &[f64], basis: &Matrix) -> Result<Projection, NumericsError> {
    if basis.rows() != target.len() {
        return Err(NumericsError::BadShape(format!(
            "target length {} != basis rows {}",
            target.len(),
            basis.rows()
        )));
    }
    if basis.cols() > basis.rows() {
        return Err(NumericsError::BadShape(
            "more basis columns than rows".into(),
        ));
    }
    let mut qr = IncrementalQr::new(basis.rows());
    let mut rank_deficient = false;
    for j in 0..basis.cols() {
        if !qr.push(basis.col(j)) {
            rank_deficient = true;
        }
    }
    let coeffs = qr.solve(target);
    let mut residual = target.to_vec();
    for (j, &c) in coeffs.iter().enumerate() {
        axpy(-c, basis.col(j), &mut residual);
    }
    Ok(Projection {
        coeffs,
        residual,
        rank_deficient,
    })
}

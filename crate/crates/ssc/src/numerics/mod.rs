//! Dense linear-algebra and clustering primitives: least-squares projection
//! via incremental QR, cyclic Jacobi eigendecomposition, and seeded k-means.

mod eigen;
mod kmeans;
mod qr;

pub use eigen::{sym_eigen, SymmetricEigen};
pub use kmeans::{kmeans, KMeansResult};
pub use qr::{least_squares_project, IncrementalQr, Projection};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("matrix not symmetric: relative asymmetry {0:.3e} exceeds tolerance")]
    NotSymmetric(f64),
    #[error("basis is numerically rank-deficient")]
    RankDeficient,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Dense column-major matrix of `f64`.
///
/// Columns are contiguous, which is the layout the self-representation
/// loop wants: a data point is a column slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::BadShape(format!(
                "rows and cols must be >= 1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(NumericsError::BadShape(format!(
                "data length {} != {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from a list of columns, all of equal length.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let rows = cols.first().map(|c| c.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows * cols.len());
        for c in cols {
            if c.len() != rows {
                return Err(NumericsError::BadShape("ragged columns".into()));
            }
            data.extend_from_slice(c);
        }
        Self::from_vec(rows, cols.len(), data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest relative off-diagonal asymmetry |a_ij - a_ji| / ||A||_F.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.frob_norm().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for j in 0..self.cols {
            for i in (j + 1)..self.rows {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for j in 0..self.cols {
            let col = self.col(j);
            let s = v[j];
            if s != 0.0 {
                for (o, c) in out.iter_mut().zip(col) {
                    *o += s * c;
                }
            }
        }
        out
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// y += s * x
#[inline]
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

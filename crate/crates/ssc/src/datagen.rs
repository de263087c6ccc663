//! Seeded synthetic union-of-subspaces datasets plus CSV load/save for
//! externally prepared data matrices.

use crate::numerics::{normalize, norm2, IncrementalQr, Matrix};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("infeasible model: sum of subspace dims {0} exceeds ambient dim {1}")]
    InfeasibleModel(usize, usize),
    #[error("bad model: {0}")]
    BadModel(String),
    #[error("parse error at {path}:{line}: {msg}")]
    ParseError {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("labels length {labels} does not match point count {points}")]
    DimensionMismatch { labels: usize, points: usize },
    #[error("column {0} has norm below 1e-12")]
    ZeroColumn(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters for one synthetic union-of-subspaces draw.
#[derive(Debug, Clone)]
pub struct SubspaceModel {
    pub ambient_dim: usize,
    pub subspace_dims: Vec<usize>,
    pub samples_per_subspace: Vec<usize>,
    pub noise_level: f64,
    pub seed: u64,
}

impl SubspaceModel {
    /// Same dimension and sample count for every subspace.
    pub fn uniform(
        ambient_dim: usize,
        num_subspaces: usize,
        subspace_dim: usize,
        samples: usize,
        noise_level: f64,
        seed: u64,
    ) -> Self {
        Self {
            ambient_dim,
            subspace_dims: vec![subspace_dim; num_subspaces],
            samples_per_subspace: vec![samples; num_subspaces],
            noise_level,
            seed,
        }
    }

    pub fn num_subspaces(&self) -> usize {
        self.subspace_dims.len()
    }

    pub fn total_samples(&self) -> usize {
        self.samples_per_subspace.iter().sum()
    }

    fn validate(&self) -> Result<(), DatagenError> {
        let dim_sum: usize = self.subspace_dims.iter().sum();
        if dim_sum > self.ambient_dim {
            return Err(DatagenError::InfeasibleModel(dim_sum, self.ambient_dim));
        }
        if self.subspace_dims.is_empty()
            || self.subspace_dims.len() != self.samples_per_subspace.len()
        {
            return Err(DatagenError::BadModel(
                "subspace_dims and samples_per_subspace must be equal-length and nonempty".into(),
            ));
        }
        if self.subspace_dims.iter().any(|&d| d == 0) {
            return Err(DatagenError::BadModel("subspace dims must be >= 1".into()));
        }
        if self.samples_per_subspace.iter().any(|&s| s == 0) {
            return Err(DatagenError::BadModel("samples per subspace must be >= 1".into()));
        }
        if self.noise_level < 0.0 || !self.noise_level.is_finite() {
            return Err(DatagenError::BadModel("noise level must be >= 0".into()));
        }
        Ok(())
    }
}

/// A data matrix with optional ground-truth subspace labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    /// D x N, unit-norm columns.
    pub x: Matrix,
    /// Subspace index per column; absent for unlabeled external data.
    pub truth: Option<Vec<usize>>,
    /// Column ordering applied during generation (identity for loaded data):
    /// output column t is source point `permutation[t]`.
    pub permutation: Vec<usize>,
}

impl LabeledDataset {
    pub fn num_points(&self) -> usize {
        self.x.cols()
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }
}

fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Draw a seeded dataset from the model: orthonormal random bases, points
/// uniform on each subspace sphere, Gaussian noise with E||e||^2 = sigma^2
/// added before a final renormalization, then a random column permutation.
pub fn generate(model: &SubspaceModel) -> Result<LabeledDataset, DatagenError> {
    model.validate()?;
    let d = model.ambient_dim;
    let n = model.total_samples();
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);

    // orthonormal basis per subspace: QR of a D x d_s gaussian draw
    let mut bases: Vec<Vec<Vec<f64>>> = Vec::with_capacity(model.num_subspaces());
    for &ds in &model.subspace_dims {
        let mut qr = IncrementalQr::new(d);
        let mut cols = Vec::with_capacity(ds);
        while cols.len() < ds {
            let g = gaussian_vec(d, &mut rng);
            if qr.push(&g) {
                cols.push(qr_last_column(&qr));
            }
        }
        bases.push(cols);
    }

    let per_coord_sigma = model.noise_level / (d as f64).sqrt();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for (ell, basis) in bases.iter().enumerate() {
        for _ in 0..model.samples_per_subspace[ell] {
            let mut coords = gaussian_vec(basis.len(), &mut rng);
            normalize(&mut coords);
            let mut x = vec![0.0; d];
            for (u, &c) in basis.iter().zip(&coords) {
                for (xi, ui) in x.iter_mut().zip(u) {
                    *xi += c * ui;
                }
            }
            if per_coord_sigma > 0.0 {
                for xi in x.iter_mut() {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    *xi += per_coord_sigma * e;
                }
            }
            normalize(&mut x);
            columns.push(x);
            truth.push(ell);
        }
    }

    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.shuffle(&mut rng);

    let permuted_cols: Vec<Vec<f64>> = permutation.iter().map(|&s| columns[s].clone()).collect();
    let permuted_truth: Vec<usize> = permutation.iter().map(|&s| truth[s]).collect();
    let x = Matrix::from_columns(&permuted_cols)
        .map_err(|e| DatagenError::BadModel(e.to_string()))?;
    Ok(LabeledDataset {
        x,
        truth: Some(permuted_truth),
        permutation,
    })
}

fn qr_last_column(qr: &IncrementalQr) -> Vec<f64> {
    qr.basis_column(qr.rank() - 1).to_vec()
}

/// Write the matrix as CSV: one row per ambient dimension, one column per
/// point, full round-trip precision.
pub fn save_matrix(x: &Matrix, path: &Path) -> Result<(), DatagenError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            if j > 0 {
                write!(w, ",")?;
            }
            write!(w, "{}", x.get(i, j))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Write labels, one integer per line.
pub fn save_labels(truth: &[usize], path: &Path) -> Result<(), DatagenError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for t in truth {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

/// Load a data matrix (CSV, rows = dimensions, columns = points) and
/// optional labels file. Columns are renormalized to unit length.
pub fn load_matrix(
    path: &Path,
    labels_path: Option<&Path>,
) -> Result<LabeledDataset, DatagenError> {
    let pstr = path.display().to_string();
    let file = std::fs::File::open(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| DatagenError::ParseError {
            path: pstr.clone(),
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(DatagenError::ParseError {
                    path: pstr.clone(),
                    line: lineno + 1,
                    msg: format!("expected {} fields, got {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatagenError::ParseError {
            path: pstr,
            line: 0,
            msg: "empty file".into(),
        });
    }
    let d = rows.len();
    let n = rows[0].len();
    let mut x = Matrix::zeros(d, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            x.set(i, j, v);
        }
    }
    for j in 0..n {
        let nj = norm2(x.col(j));
        if nj < 1e-12 {
            return Err(DatagenError::ZeroColumn(j));
        }
        for v in x.col_mut(j) {
            *v /= nj;
        }
    }

    let truth = match labels_path {
        None => None,
        Some(lp) => {
            let lstr = lp.display().to_string();
            let file = std::fs::File::open(lp)?;
            let mut labels = Vec::new();
            for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
                let line = line?;
                let t = line.trim();
                if t.is_empty() {
                    continue;
                }
                labels.push(t.parse::<usize>().map_err(|e| DatagenError::ParseError {
                    path: lstr.clone(),
                    line: lineno + 1,
                    msg: e.to_string(),
                })?);
            }
            if labels.len() != n {
                return Err(DatagenError::DimensionMismatch {
                    labels: labels.len(),
                    points: n,
                });
            }
            Some(labels)
        }
    };

    Ok(LabeledDataset {
        x,
        truth,
        permutation: (0..n).collect(),
    })
}

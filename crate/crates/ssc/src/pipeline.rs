//! Full clustering runs: the sequential active self-representation loop
//! (OMP-SSC is the b=0, p=0 special case), the l1 baseline pass, similarity
//! construction, and normalized spectral clustering.

use crate::datagen::LabeledDataset;
use crate::metrics::{
    clustering_error, connectivity, normalized_laplacian, sdp_percentage, MetricsRecord,
};
use crate::numerics::{kmeans, norm2, sym_eigen, Matrix, NumericsError};
use crate::selfrep::{
    active_update, default_lambda, lasso_represent, maybe_drop, omp_represent, residual,
    DictionaryMask, OpCounter, SparseColumn, LASSO_SUPPORT_REL_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Which self-representation pass drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    L1Ssc,
    OmpSsc,
    AOmpSsc,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::L1Ssc => "l1-ssc",
            Variant::OmpSsc => "omp-ssc",
            Variant::AOmpSsc => "a-omp-ssc",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "l1-ssc" | "l1_ssc" | "l1" => Some(Variant::L1Ssc),
            "omp-ssc" | "omp_ssc" | "omp" => Some(Variant::OmpSsc),
            "a-omp-ssc" | "a_omp_ssc" | "aomp" | "a-omp" => Some(Variant::AOmpSsc),
            _ => None,
        }
    }
}

/// How the LASSO penalty is chosen for the l1 baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LassoPenalty {
    /// lambda = alpha / max_{j != i} |<x_i, x_j>| per point.
    Scaled { alpha: f64 },
    Fixed(f64),
}

impl Default for LassoPenalty {
    fn default() -> Self {
        LassoPenalty::Scaled { alpha: 20.0 }
    }
}

/// Parameters for one clustering run.
#[derive(Debug, Clone)]
pub struct AlgorithmParams {
    pub variant: Variant,
    pub d: usize,
    pub b: f64,
    pub p: f64,
    pub penalty: LassoPenalty,
    pub k: usize,
    pub seed: u64,
}

impl AlgorithmParams {
    pub fn omp_ssc(d: usize, k: usize, seed: u64) -> Self {
        Self {
            variant: Variant::OmpSsc,
            d,
            b: 0.0,
            p: 0.0,
            penalty: LassoPenalty::default(),
            k,
            seed,
        }
    }

    pub fn a_omp_ssc(d: usize, b: f64, p: f64, k: usize, seed: u64) -> Self {
        Self {
            variant: Variant::AOmpSsc,
            d,
            b,
            p,
            penalty: LassoPenalty::default(),
            k,
            seed,
        }
    }

    pub fn l1_ssc(k: usize, seed: u64) -> Self {
        Self {
            variant: Variant::L1Ssc,
            d: 0,
            b: 0.0,
            p: 0.0,
            penalty: LassoPenalty::default(),
            k,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.k == 0 {
            return Err(PipelineError::InvalidParams("k must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(PipelineError::InvalidParams(format!(
                "p must be in [0,1], got {}",
                self.p
            )));
        }
        if !self.b.is_finite() {
            return Err(PipelineError::InvalidParams("b must be finite".into()));
        }
        match self.variant {
            Variant::L1Ssc => {
                if let LassoPenalty::Fixed(l) = self.penalty {
                    if l <= 0.0 {
                        return Err(PipelineError::InvalidParams(
                            "fixed lambda must be > 0".into(),
                        ));
                    }
                }
            }
            Variant::OmpSsc => {
                if self.b != 0.0 || self.p != 0.0 {
                    return Err(PipelineError::InvalidParams(
                        "omp-ssc requires b = 0 and p = 0".into(),
                    ));
                }
                if self.d == 0 {
                    return Err(PipelineError::InvalidParams("d must be >= 1".into()));
                }
            }
            Variant::AOmpSsc => {
                if self.d == 0 {
                    return Err(PipelineError::InvalidParams("d must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric nonnegative similarity |C| + |C|^T with zero diagonal.
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    pub a: Matrix,
}

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub coefficients: Vec<SparseColumn>,
    pub similarity: SimilarityGraph,
    /// Present when the dataset carries ground-truth labels.
    pub metrics: Option<MetricsRecord>,
    pub counter: OpCounter,
    pub wall_time: f64,
}

fn mix_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The sequential loop of the active algorithm: represent, update, maybe
/// drop, for every column in stored order. Later points see earlier points'
/// updated versions and the shrunken dictionary.
pub fn self_representation_pass(
    dataset: &LabeledDataset,
    params: &AlgorithmParams,
) -> Result<(Vec<SparseColumn>, Matrix, OpCounter), PipelineError> {
    params.validate()?;
    let n = dataset.num_points();
    if n < 2 {
        return Err(PipelineError::InvalidParams(
            "need at least 2 points".into(),
        ));
    }
    let mut x = dataset.x.clone();
    let mut mask = DictionaryMask::new_full(n);
    let mut counter = OpCounter::default();
    let mut drop_rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, 1));
    let mut columns = Vec::with_capacity(n);

    for i in 0..n {
        let x_i = x.col(i).to_vec();
        let c_i = omp_represent(&x_i, &x, i, &mask, params.d, &mut counter);
        let r_i = residual(&x_i, &x, &c_i);
        if params.b != 0.0 {
            let updated = active_update(&x_i, &r_i, params.b);
            x.col_mut(i).copy_from_slice(&updated.point);
        }
        mask = maybe_drop(&mask, i, params.p, &mut drop_rng);
        columns.push(c_i);
    }
    Ok((columns, x, counter))
}

/// A_jk = |C_jk| + |C_kj| with zero diagonal.
pub fn build_similarity(columns: &[SparseColumn]) -> SimilarityGraph {
    let n = columns.len();
    let mut a = Matrix::zeros(n, n);
    for (i, c) in columns.iter().enumerate() {
        debug_assert_eq!(c.len, n);
        for (&j, &v) in c.indices.iter().zip(&c.values) {
            if j == i {
                continue;
            }
            let w = v.abs();
            a.set(j, i, a.get(j, i) + w);
            a.set(i, j, a.get(i, j) + w);
        }
    }
    SimilarityGraph { a }
}

/// Normalized spectral clustering: k smallest-eigenvalue eigenvectors of the
/// normalized Laplacian, row-normalized, then seeded k-means.
pub fn spectral_cluster(
    graph: &SimilarityGraph,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, PipelineError> {
    let n = graph.a.rows();
    if k == 0 || n < k {
        return Err(PipelineError::InvalidParams(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let lap = normalized_laplacian(&graph.a);
    let eig = sym_eigen(&lap)?;
    let mut embedding = Matrix::zeros(n, k);
    for col in 0..k {
        let v = eig.eigenvectors.col(col);
        for (row, &val) in v.iter().enumerate() {
            embedding.set(row, col, val);
        }
    }
    // Ng-Jordan-Weiss row normalization, zero rows left alone
    for row in 0..n {
        let r: Vec<f64> = (0..k).map(|c| embedding.get(row, c)).collect();
        let nr = norm2(&r);
        if nr > 0.0 {
            for c in 0..k {
                embedding.set(row, c, embedding.get(row, c) / nr);
            }
        }
    }
    let result = kmeans(&embedding, k, seed, 10)?;
    Ok(result.labels)
}

/// Dispatch one full clustering run and collect metrics when ground truth is
/// available.
pub fn run(dataset: &LabeledDataset, params: &AlgorithmParams) -> Result<ClusteringResult, PipelineError> {
    params.validate()?;
    let start = Instant::now();
    let n = dataset.num_points();

    let (columns, counter, sdp_threshold) = match params.variant {
        Variant::L1Ssc => {
            let mut cols = Vec::with_capacity(n);
            let mut counter = OpCounter::default();
            let mut max_abs_total = 0.0f64;
            for i in 0..n {
                let x_i = dataset.x.col(i);
                let lambda = match params.penalty {
                    LassoPenalty::Fixed(l) => l,
                    LassoPenalty::Scaled { alpha } => default_lambda(x_i, &dataset.x, i, alpha),
                };
                let sol = lasso_represent(x_i, &dataset.x, i, lambda);
                counter.inner_products += (sol.sweeps as u64) * (n as u64 - 1);
                counter.flops_estimate +=
                    (sol.sweeps as u64) * (n as u64 - 1) * 2 * dataset.dim() as u64;
                max_abs_total = max_abs_total
                    .max(sol.column.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                cols.push(sol.column);
            }
            let threshold = LASSO_SUPPORT_REL_TOL * max_abs_total;
            (cols, counter, threshold)
        }
        Variant::OmpSsc | Variant::AOmpSsc => {
            let (cols, _x_final, counter) = self_representation_pass(dataset, params)?;
            (cols, counter, 1e-8)
        }
    };

    let similarity = build_similarity(&columns);
    let labels = spectral_cluster(&similarity, params.k, mix_seed(params.seed, 2))?;
    let wall_time = start.elapsed().as_secs_f64();

    let metrics = dataset.truth.as_ref().map(|truth| {
        let error_rate = clustering_error(&labels, truth).expect("equal lengths");
        let conn = connectivity(&similarity.a, truth);
        let mean_connectivity = if conn.is_empty() {
            0.0
        } else {
            conn.iter().sum::<f64>() / conn.len() as f64
        };
        MetricsRecord {
            error_rate,
            connectivity: conn,
            mean_connectivity,
            sdp_percentage: sdp_percentage(&columns, truth, sdp_threshold),
            inner_products: counter.inner_products,
            wall_time,
        }
    });

    Ok(ClusteringResult {
        labels,
        coefficients: columns,
        similarity,
        metrics,
        counter,
        wall_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, SubspaceModel};
    use rand::{Rng, SeedableRng};

    fn dataset(seed: u64, sigma: f64) -> LabeledDataset {
        generate(&SubspaceModel::uniform(12, 3, 2, 10, sigma, seed)).unwrap()
    }

    #[test]
    fn omp_ssc_rejects_nonzero_b_or_p() {
        let mut params = AlgorithmParams::omp_ssc(3, 3, 1);
        params.b = 0.5;
        assert!(params.validate().is_err());
        params.b = 0.0;
        params.p = 0.1;
        assert!(params.validate().is_err());
    }

    #[test]
    fn orthonormal_columns_single_atom() {
        // X = I: every point is orthogonal to every other, so coefficients
        // are zero but support still has one (tie-broken) entry
        let x = Matrix::identity(4);
        let ds = LabeledDataset {
            x,
            truth: None,
            permutation: (0..4).collect(),
        };
        let params = AlgorithmParams::omp_ssc(1, 2, 0);
        let (cols, _, _) = self_representation_pass(&ds, &params).unwrap();
        for (i, c) in cols.iter().enumerate() {
            assert_eq!(c.support_size(), 1);
            assert!(!c.indices.contains(&i));
            assert!(c.values[0].abs() <= 1e-12);
        }
    }

    #[test]
    fn certain_drop_starves_late_points() {
        let ds = dataset(3, 0.2);
        let n = ds.num_points();
        let params = AlgorithmParams::a_omp_ssc(3, 0.0, 1.0, 3, 7);
        let (cols, _, _) = self_representation_pass(&ds, &params).unwrap();
        // with p=1 point i sees n-1-i atoms; the last point sees none
        assert!(cols[n - 1].trivial);
        for (i, c) in cols.iter().enumerate() {
            assert!(c.support_size() <= (n - 1 - i).min(3));
        }
    }

    #[test]
    fn dropping_reduces_inner_product_count() {
        let ds = generate(&SubspaceModel::uniform(40, 3, 6, 45, 0.5, 11)).unwrap();
        let n = ds.num_points() as u64;
        let base = AlgorithmParams::omp_ssc(3, 3, 5);
        let (_, _, c0) = self_representation_pass(&ds, &base).unwrap();
        assert_eq!(c0.inner_products, n * 3 * (n - 1));
        let active = AlgorithmParams::a_omp_ssc(3, 1.0, 0.8, 3, 5);
        let (cols, _, c1) = self_representation_pass(&ds, &active).unwrap();
        assert!(c1.inner_products < c0.inner_products);
        for c in &cols {
            assert!(c.support_size() <= 3);
        }
    }

    #[test]
    fn similarity_symmetrizes_single_edge() {
        let mut c = vec![SparseColumn::empty(2), SparseColumn::empty(2)];
        c[0] = SparseColumn {
            len: 2,
            indices: vec![1],
            values: vec![-0.5],
            trivial: false,
        };
        let g = build_similarity(&c);
        assert_eq!(g.a.get(0, 1), 0.5);
        assert_eq!(g.a.get(1, 0), 0.5);
        assert_eq!(g.a.get(0, 0), 0.0);
    }

    #[test]
    fn similarity_symmetric_nonnegative_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(66);
        for _ in 0..20 {
            let n = rng.gen_range(2..12);
            let cols: Vec<SparseColumn> = (0..n)
                .map(|i| {
                    let mut entries: Vec<(usize, f64)> = Vec::new();
                    for j in 0..n {
                        if j != i && rng.gen_bool(0.3) {
                            entries.push((j, rng.gen_range(-1.0..1.0)));
                        }
                    }
                    SparseColumn {
                        len: n,
                        indices: entries.iter().map(|e| e.0).collect(),
                        values: entries.iter().map(|e| e.1).collect(),
                        trivial: entries.is_empty(),
                    }
                })
                .collect();
            let g = build_similarity(&cols);
            for i in 0..n {
                assert_eq!(g.a.get(i, i), 0.0);
                for j in 0..n {
                    assert_eq!(g.a.get(i, j), g.a.get(j, i));
                    assert!(g.a.get(i, j) >= 0.0);
                }
            }
        }
    }

    fn block_graph(sizes: &[usize], within: f64, cross: f64) -> (SimilarityGraph, Vec<usize>) {
        let n: usize = sizes.iter().sum();
        let mut truth = Vec::new();
        for (ell, &s) in sizes.iter().enumerate() {
            truth.extend(std::iter::repeat(ell).take(s));
        }
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    a.set(i, j, if truth[i] == truth[j] { within } else { cross });
                }
            }
        }
        (SimilarityGraph { a }, truth)
    }

    #[test]
    fn block_diagonal_graph_recovers_blocks() {
        let (g, truth) = block_graph(&[5, 4, 6], 1.0, 0.0);
        let labels = spectral_cluster(&g, 3, 42).unwrap();
        assert_eq!(crate::metrics::clustering_error(&labels, &truth).unwrap(), 0.0);
    }

    #[test]
    fn single_community_k1() {
        let (g, _) = block_graph(&[6], 1.0, 0.0);
        let labels = spectral_cluster(&g, 1, 3).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn noisy_two_block_graph() {
        let (g, truth) = block_graph(&[20, 20], 1.0, 0.05);
        let labels = spectral_cluster(&g, 2, 17).unwrap();
        assert_eq!(crate::metrics::clustering_error(&labels, &truth).unwrap(), 0.0);
    }

    // exhaustive normalized-cut oracle on a 12-node noisy 2-block instance
    #[test]
    fn matches_exhaustive_normalized_cut() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let truth: Vec<usize> = (0..n).map(|i| if i < 6 { 0 } else { 1 }).collect();
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let base = if truth[i] == truth[j] { 1.0 } else { 0.05 };
                let w = base * rng.gen_range(0.5..1.5);
                a.set(i, j, w);
                a.set(j, i, w);
            }
        }
        let g = SimilarityGraph { a };
        let labels = spectral_cluster(&g, 2, 23).unwrap();

        // brute-force minimum normalized cut over all 2-partitions
        let mut best_mask = 1u32;
        let mut best_ncut = f64::INFINITY;
        for mask in 1..(1u32 << n) - 1 {
            let mut cut = 0.0;
            let mut vol = [0.0f64; 2];
            for i in 0..n {
                let gi = ((mask >> i) & 1) as usize;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let w = g.a.get(i, j);
                    vol[gi] += w;
                    if gi != ((mask >> j) & 1) as usize {
                        cut += w;
                    }
                }
            }
            let cut = cut / 2.0;
            if vol[0] <= 0.0 || vol[1] <= 0.0 {
                continue;
            }
            let ncut = cut / vol[0] + cut / vol[1];
            if ncut < best_ncut {
                best_ncut = ncut;
                best_mask = mask;
            }
        }
        let oracle: Vec<usize> = (0..n).map(|i| ((best_mask >> i) & 1) as usize).collect();
        assert_eq!(
            crate::metrics::clustering_error(&labels, &oracle).unwrap(),
            0.0
        );
    }

    #[test]
    fn noiseless_separated_subspaces_cluster_perfectly() {
        let ds = generate(&SubspaceModel::uniform(30, 3, 3, 12, 0.0, 19)).unwrap();
        let params = AlgorithmParams::omp_ssc(3, 3, 4);
        let result = run(&ds, &params).unwrap();
        let m = result.metrics.unwrap();
        assert_eq!(m.error_rate, 0.0);
        assert_eq!(m.sdp_percentage, 100.0);
    }

    #[test]
    fn run_is_deterministic() {
        let ds = dataset(7, 0.4);
        let params = AlgorithmParams::a_omp_ssc(2, 1.0, 0.5, 3, 13);
        let a = run(&ds, &params).unwrap();
        let b = run(&ds, &params).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.coefficients, b.coefficients);
        assert_eq!(a.similarity.a.data(), b.similarity.a.data());
        assert_eq!(a.counter, b.counter);
    }

    #[test]
    fn omp_ssc_is_a_omp_ssc_special_case() {
        for seed in 0..5 {
            let ds = dataset(seed, 0.3);
            let omp = AlgorithmParams::omp_ssc(2, 3, seed);
            let mut active = AlgorithmParams::a_omp_ssc(2, 0.0, 0.0, 3, seed);
            active.variant = Variant::AOmpSsc;
            let a = run(&ds, &omp).unwrap();
            let b = run(&ds, &active).unwrap();
            assert_eq!(a.coefficients, b.coefficients);
            assert_eq!(a.similarity.a.data(), b.similarity.a.data());
            assert_eq!(a.labels, b.labels);
        }
    }

    #[test]
    fn all_columns_populated_or_flagged() {
        let ds = dataset(2, 0.5);
        let params = AlgorithmParams::a_omp_ssc(2, 1.0, 0.9, 3, 3);
        let result = run(&ds, &params).unwrap();
        assert_eq!(result.coefficients.len(), ds.num_points());
        for c in &result.coefficients {
            assert!(c.trivial || c.support_size() >= 1);
        }
        // labels form a valid k-partition
        assert!(result.labels.iter().all(|&l| l < 3));
    }

    #[test]
    fn l1_baseline_runs_and_scores() {
        let ds = generate(&SubspaceModel::uniform(20, 2, 3, 10, 0.1, 31)).unwrap();
        let params = AlgorithmParams::l1_ssc(2, 9);
        let result = run(&ds, &params).unwrap();
        let m = result.metrics.unwrap();
        assert!(m.error_rate <= 0.2, "l1 error {}", m.error_rate);
        for c in &result.coefficients {
            assert!(!c.indices.is_empty() || c.trivial);
        }
    }
}

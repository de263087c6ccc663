//! Seeded k-means with k-means++ initialization and best-of-restarts.

use super::{Matrix, NumericsError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_ITERS: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub wcss: f64,
    /// Fewer distinct points than clusters; labels assigned lexicographically.
    pub degenerate: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Cluster the rows of `points` (n points in R^dim) into `k` groups.
/// Deterministic given `seed`; the best of `restarts` runs by within-cluster
/// sum of squares wins.
pub fn kmeans(
    points: &Matrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult, NumericsError> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(NumericsError::BadShape(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if restarts == 0 {
        return Err(NumericsError::BadShape("restarts must be >= 1".into()));
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| points.row(i)).collect();

    // degenerate input: fewer distinct points than clusters
    let mut distinct: Vec<&Vec<f64>> = Vec::new();
    for r in &rows {
        if !distinct.iter().any(|d| *d == r) {
            distinct.push(r);
        }
    }
    if distinct.len() < k {
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let labels = rows
            .iter()
            .map(|r| distinct.iter().position(|d| *d == r).unwrap())
            .collect();
        return Ok(KMeansResult {
            labels,
            wcss: 0.0,
            degenerate: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;

    for _ in 0..restarts {
        let centers = plus_plus_init(&rows, k, &mut rng);
        let (labels, wcss) = lloyd(&rows, centers, k);
        if best.as_ref().map_or(true, |b| wcss < b.wcss) {
            best = Some(KMeansResult {
                labels,
                wcss,
                degenerate: false,
            });
        }
    }
    Ok(best.unwrap())
}

fn plus_plus_init(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(rows[rng.gen_range(0..n)].clone());
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // all mass on existing centers; pick the first point not yet chosen
            (0..n)
                .find(|&i| !centers.contains(&rows[i]))
                .unwrap_or(0)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        };
        centers.push(rows[next].clone());
        for (i, r) in rows.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(r, centers.last().unwrap()));
        }
    }
    centers
}

fn lloyd(rows: &[Vec<f64>], mut centers: Vec<Vec<f64>>, k: usize) -> (Vec<usize>, f64) {
    let n = rows.len();
    let dim = rows[0].len();
    let mut labels = vec![0usize; n];
    for _ in 0..MAX_ITERS {
        let mut changed = false;
        for (i, r) in rows.iter().enumerate() {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(r, center);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }
        // refill empty clusters with the point farthest from its center
        loop {
            let mut counts = vec![0usize; k];
            for &l in &labels {
                counts[l] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let mut far_i = 0;
            let mut far_d = -1.0;
            for (i, r) in rows.iter().enumerate() {
                if counts[labels[i]] <= 1 {
                    continue;
                }
                let d = sq_dist(r, &centers[labels[i]]);
                if d > far_d {
                    far_d = d;
                    far_i = i;
                }
            }
            labels[far_i] = empty;
            centers[empty] = rows[far_i].clone();
            changed = true;
        }
        if !changed {
            break;
        }
        for c in 0..k {
            let mut mean = vec![0.0; dim];
            let mut count = 0usize;
            for (i, r) in rows.iter().enumerate() {
                if labels[i] == c {
                    for (m, x) in mean.iter_mut().zip(r) {
                        *m += x;
                    }
                    count += 1;
                }
            }
            if count > 0 {
                for m in mean.iter_mut() {
                    *m /= count as f64;
                }
                centers[c] = mean;
            }
        }
    }
    let wcss = rows
        .iter()
        .zip(&labels)
        .map(|(r, &l)| sq_dist(r, &centers[l]))
        .sum();
    (labels, wcss)
}

//! Cyclic Jacobi eigendecomposition for real symmetric matrices.

use super::{Matrix, NumericsError};

const SYMMETRY_TOL: f64 = 1e-10;
const OFFDIAG_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Full spectrum of a symmetric matrix, eigenvalues ascending with aligned
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

/// Eigendecomposition by cyclic Jacobi rotations. Sweeps until the
/// off-diagonal Frobenius norm drops below `1e-12 * ||M||_F`, capped at 100
/// sweeps. Each eigenvector is sign-fixed so its largest-magnitude entry is
/// positive.
pub fn sym_eigen(m: &Matrix) -> Result<SymmetricEigen, NumericsError> {
    let n = m.rows();
    if n != m.cols() {
        return Err(NumericsError::BadShape(format!(
            "expected square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(NumericsError::NotSymmetric(asym));
    }

    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let frob = m.frob_norm();
    let target = OFFDIAG_TOL * frob;

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for q in 0..n {
                for p in 0..q {
                    let x = a.get(p, q);
                    s += 2.0 * x * x;
                }
            }
            s.sqrt()
        };
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= target / (n as f64) {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // rows/cols p and q of A
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                // accumulate rotations into V
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vecs = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(a.get(src, src));
        let mut col = v.col(src).to_vec();
        // sign convention: largest-magnitude entry positive
        let mut best = 0usize;
        for (k, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = k;
            }
        }
        if col[best] < 0.0 {
            for x in col.iter_mut() {
                *x = -*x;
            }
        }
        vecs.col_mut(dst).copy_from_slice(&col);
    }

    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors: vecs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_spectrum() {
        let e = sym_eigen(&Matrix::identity(2)).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let m = Matrix::from_vec(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0])
            .unwrap();
        let e = sym_eigen(&m).unwrap();
        assert_eq!(e.eigenvalues.len(), 3);
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-12);
        assert!((e.eigenvalues[2] - 3.0).abs() < 1e-12);
    }

    // hand diagonalization: [[0,1],[1,0]] has eigenpairs (-1, (1,-1)/sqrt2)
    // and (1, (1,1)/sqrt2)
    #[test]
    fn exchange_matrix() {
        let m = Matrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = sym_eigen(&m).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        let v0 = e.eigenvectors.col(0);
        assert!((v0[0].abs() - s).abs() < 1e-12 && (v0[1].abs() - s).abs() < 1e-12);
        assert!((v0[0] + v0[1]).abs() < 1e-12);
        let v1 = e.eigenvectors.col(1);
        assert!((v1[0] - s).abs() < 1e-12 && (v1[1] - s).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_vec(2, 2, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(matches!(
            sym_eigen(&m),
            Err(NumericsError::NotSymmetric(_))
        ));
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = rng.gen_range(-1.0..1.0);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..12);
            let m = random_symmetric(n, &mut rng);
            let e = sym_eigen(&m).unwrap();
            let frob = m.frob_norm().max(1e-300);
            // residual per eigenpair
            for k in 0..n {
                let vk = e.eigenvectors.col(k);
                let mv = m.matvec(vk);
                let mut r2 = 0.0;
                for i in 0..n {
                    let d = mv[i] - e.eigenvalues[k] * vk[i];
                    r2 += d * d;
                }
                assert!(r2.sqrt() <= 1e-8 * frob);
            }
            // orthonormal columns
            for k in 0..n {
                for l in 0..n {
                    let g = dot(e.eigenvectors.col(k), e.eigenvectors.col(l));
                    let expect = if k == l { 1.0 } else { 0.0 };
                    assert!((g - expect).abs() <= 1e-8);
                }
            }
            // reconstruction ||V L V^T - M||_F <= 1e-7 ||M||_F
            let mut err2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += e.eigenvectors.get(i, k)
                            * e.eigenvalues[k]
                            * e.eigenvectors.get(j, k);
                    }
                    let d = s - m.get(i, j);
                    err2 += d * d;
                }
            }
            assert!(err2.sqrt() <= 1e-7 * frob);
            // trace identity
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((trace - sum).abs() <= 1e-8 * frob.max(1.0));
        }
    }

    #[test]
    fn psd_smallest_eigenvalue_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let n = rng.gen_range(1..10);
            let b = random_symmetric(n, &mut rng);
            // M = B^T B is PSD
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += b.get(k, i) * b.get(k, j);
                    }
                    m.set(i, j, s);
                }
            }
            let e = sym_eigen(&m).unwrap();
            assert!(e.eigenvalues[0] >= -1e-8 * m.frob_norm());
        }
    }
}

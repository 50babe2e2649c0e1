//! Standardization and principal component analysis.
//!
//! The covariance of the standardized training data is diagonalized with
//! cyclic Jacobi rotations, which is exact to rounding and fully
//! deterministic for the small (6×6) matrices used here.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Column-wise z-score transform with population statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Population standard deviations; 1 where the column is constant.
    pub stds: Vec<f64>,
    /// Columns whose variance was zero on the fitting data.
    pub zero_variance: Vec<bool>,
}

fn check_matrix(x: &[Vec<f64>]) -> Result<usize> {
    if x.len() < 2 {
        return Err(Error::input("at least two rows are required"));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(Error::input("rows must be non-empty and of equal length"));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::input("feature values must be finite"));
    }
    Ok(d)
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(x)?;
        let n = x.len() as f64;
        let mut means = vec![0.0; d];
        for row in x {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for row in x {
            for ((s, v), m) in vars.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let mut stds = Vec::with_capacity(d);
        let mut zero_variance = Vec::with_capacity(d);
        for v in vars {
            let sd = (v / n).sqrt();
            if sd > 0.0 {
                stds.push(sd);
                zero_variance.push(false);
            } else {
                stds.push(1.0);
                zero_variance.push(true);
            }
        }
        Ok(Standardizer {
            means,
            stds,
            zero_variance,
        })
    }

    pub fn has_zero_variance(&self) -> bool {
        self.zero_variance.iter().any(|z| *z)
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.means.len() {
            return Err(Error::input(alloc::format!(
                "expected {} features, got {}",
                self.means.len(),
                row.len()
            )));
        }
        Ok(row
            .iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

/// A fitted PCA projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub scaler: Standardizer,
    /// `n_components` orthonormal rows of length `d`.
    pub components: Vec<Vec<f64>>,
    /// All `d` eigenvalues of the standardized covariance, descending.
    pub eigenvalues: Vec<f64>,
    pub n_components: usize,
}

impl PcaModel {
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        let z = self.scaler.transform_row(row)?;
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(&z).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Share of the total standardized variance captured by each retained
    /// component.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        let total: f64 = self.eigenvalues.iter().sum();
        self.eigenvalues[..self.n_components]
            .iter()
            .map(|l| if total > 0.0 { l / total } else { 0.0 })
            .collect()
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as rows, in the
/// order the diagonal ends up (unsorted). Iterates until the off-diagonal
/// Frobenius norm falls below 1e-12.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::input("matrix must be square"));
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    // v[i] is the i-th eigenvector (row form of the accumulated rotation).
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let off_norm = |m: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    s += x * x;
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&m) < JACOBI_TOL {
            let values = (0..n).map(|i| m[i][i]).collect();
            return Ok((values, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // m ← Jᵀ m J with J the (p, q) rotation
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                m[p][q] = 0.0;
                m[q][p] = 0.0;
                for k in 0..n {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    if off_norm(&m) < JACOBI_TOL {
        let values = (0..n).map(|i| m[i][i]).collect();
        return Ok((values, v));
    }
    Err(Error::NoConvergence {
        what: "Jacobi eigensolver",
        iterations: JACOBI_MAX_SWEEPS,
    })
}

/// Fits a PCA with `n_components` retained components on the rows of `x`.
///
/// Each component is signed so that its largest-magnitude entry is positive.
pub fn pca_fit(x: &[Vec<f64>], n_components: usize) -> Result<PcaModel> {
    let d = check_matrix(x)?;
    if n_components == 0 || n_components > d {
        return Err(Error::input(alloc::format!(
            "n_components must lie in 1..={d}"
        )));
    }
    let scaler = Standardizer::fit(x)?;
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|r| scaler.transform_row(r))
        .collect::<Result<_>>()?;
    let n = z.len() as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for row in &z {
        for i in 0..d {
            for j in i..d {
                cov[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }

    let (values, vectors) = jacobi_eigen(&cov)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();
    let components = order[..n_components]
        .iter()
        .map(|&i| {
            let mut c = vectors[i].clone();
            let lead = c
                .iter()
                .copied()
                .enumerate()
                .fold((0, 0.0f64), |best, (j, x)| {
                    if x.abs() > best.1.abs() {
                        (j, x)
                    } else {
                        best
                    }
                });
            if lead.1 < 0.0 {
                c.iter_mut().for_each(|x| *x = -*x);
            }
            c
        })
        .collect();
    Ok(PcaModel {
        scaler,
        components,
        eigenvalues,
        n_components,
    })
}

/// Projects every row of `x` with `model`.
pub fn pca_transform(model: &PcaModel, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    x.iter().map(|r| model.transform_row(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::seed::rng(seed);
        (0..n)
            .map(|_| {
                let base: f64 = rng.random();
                (0..d)
                    .map(|j| base * j as f64 + rng.random::<f64>() * (j + 1) as f64)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rank_one_structure() {
        let x: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let f1 = i as f64 * 0.37 - 3.0;
                vec![f1, 2.0 * f1, 5.0, 5.0, 1.0, -2.0]
            })
            .collect();
        let m = pca_fit(&x, 1).unwrap();
        assert!(m.explained_variance_ratio()[0] >= 0.999);
        assert_eq!(
            m.scaler.zero_variance,
            vec![false, false, true, true, true, true]
        );
        assert!(m.scaler.has_zero_variance());
        // trace = number of non-degenerate features
        let sum: f64 = m.eigenvalues.iter().sum();
        assert!((sum - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mean_projects_to_zero() {
        let x = random_rows(40, 6, 1);
        let m = pca_fit(&x, 3).unwrap();
        let p = m.transform_row(&m.scaler.means).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn trace_and_orthonormality() {
        let x = random_rows(200, 6, 2);
        let m = pca_fit(&x, 6).unwrap();
        let sum: f64 = m.eigenvalues.iter().sum();
        assert!((sum - 6.0).abs() < 1e-9);
        for (i, a) in m.components.iter().enumerate() {
            for (j, b) in m.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9);
            }
        }
        for w in m.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn projection_variance_is_eigenvalue() {
        let x = random_rows(300, 6, 3);
        let m = pca_fit(&x, 2).unwrap();
        let p = pca_transform(&m, &x).unwrap();
        for c in 0..2 {
            let n = p.len() as f64;
            let mean = p.iter().map(|r| r[c]).sum::<f64>() / n;
            let var = p.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n;
            assert!((var - m.eigenvalues[c]).abs() / m.eigenvalues[c] < 1e-9);
        }
    }

    #[test]
    fn sign_convention() {
        let x = random_rows(100, 4, 4);
        let m = pca_fit(&x, 4).unwrap();
        for c in &m.components {
            let lead = c
                .iter()
                .copied()
                .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn jacobi_diagonal_and_known() {
        let (vals, _) = jacobi_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut vals = vals;
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        assert!(jacobi_eigen(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn input_checks() {
        assert!(pca_fit(&[vec![1.0, 2.0]], 1).is_err());
        assert!(pca_fit(&[vec![1.0, 2.0], vec![2.0, 1.0]], 3).is_err());
        assert!(pca_fit(&[vec![1.0, 2.0], vec![2.0]], 1).is_err());
        let m = pca_fit(&[vec![1.0, 2.0], vec![2.0, 1.0]], 1).unwrap();
        assert!(m.transform_row(&[1.0]).is_err());
    }
}

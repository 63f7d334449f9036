//! Symmetric tridiagonal eigensolver: implicit QL with Wilkinson-type shifts.

use thiserror::Error;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("QL iteration did not converge for eigenvalue {index} after {MAX_SWEEPS} sweeps")]
    ConvergenceFailure { index: usize },
    #[error("off-diagonal length {off} does not match diagonal length {diag}")]
    Shape { diag: usize, off: usize },
    #[error("empty matrix")]
    Empty,
}

/// Eigen-decomposition of a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[j]` belongs to `values[j]`, unit norm.
    pub vectors: Vec<Vec<f64>>,
}

/// `diag` has length `n`, `off[i]` is the `(i, i+1)` element.
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<TridiagEigen, EigenError> {
    let n = diag.len();
    if n == 0 {
        return Err(EigenError::Empty);
    }
    if off.len() + 1 != n {
        return Err(EigenError::Shape {
            diag: n,
            off: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // row-major, column j is the j-th eigenvector
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(EigenError::ConvergenceFailure { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk = &mut z[k * n..(k + 1) * n];
                    let f = zk[i + 1];
                    zk[i + 1] = s * zk[i] + c * f;
                    zk[i] = c * zk[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| z[k * n + j]).collect())
        .collect();
    Ok(TridiagEigen { values, vectors })
}

/// Lowest eigenpair.
pub fn lowest_eigenpair(diag: &[f64], off: &[f64]) -> Result<(f64, Vec<f64>), EigenError> {
    let mut eig = eigh_tridiagonal(diag, off)?;
    let v = eig.vectors.swap_remove(0);
    Ok((eig.values[0], v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let eig = eigh_tridiagonal(&[2.0, 2.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 3.0, epsilon = 1e-14);
        let v = &eig.vectors[0];
        assert_abs_diff_eq!(v[0].abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(v[0], -v[1], epsilon = 1e-14);
    }

    #[test]
    fn one_by_one() {
        let (e, v) = lowest_eigenpair(&[-3.5], &[]).unwrap();
        assert_eq!(e, -3.5);
        assert_eq!(v, vec![1.0]);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let eig = eigh_tridiagonal(&[3.0, -1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn free_chain_spectrum() {
        // path graph Laplacian-like: eigenvalues -2 cos(k pi/(n+1))
        let n = 40;
        let eig = eigh_tridiagonal(&vec![0.0; n], &vec![-1.0; n - 1]).unwrap();
        for (j, val) in eig.values.iter().enumerate() {
            let k = (j + 1) as f64;
            let expect = -2.0 * (k * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_abs_diff_eq!(*val, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn shape_errors() {
        assert_eq!(eigh_tridiagonal(&[], &[]).unwrap_err(), EigenError::Empty);
        assert!(matches!(
            eigh_tridiagonal(&[1.0, 2.0], &[]),
            Err(EigenError::Shape { .. })
        ));
    }
}

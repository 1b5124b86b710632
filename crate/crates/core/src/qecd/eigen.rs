//! Symmetric tridiagonal eigensolver: implicit-shift QL with eigenvector
//! accumulation.
//!
//! Eigenvectors are stored column-major so the Givens rotations act on two
//! contiguous slices; that inner loop dominates the O(n³) cost and
//! vectorizes. Eigenpairs come back sorted ascending with a deterministic
//! sign convention.

use crate::error::{LabError, Result};

/// Full eigendecomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and subdiagonal `offdiag` (length n−1). Returns ascending
/// eigenvalues and the matching orthonormal eigenvectors (ℓ² normalized),
/// one contiguous column per eigenpair.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 || offdiag.len() != n - 1 {
        return Err(LabError::SolverError("bad tridiagonal dimensions".into()));
    }
    let mut d = diag.to_vec();
    // e[0..n-1] holds the subdiagonal with a scratch slot at the end
    let mut e = Vec::with_capacity(n);
    e.extend_from_slice(offdiag);
    e.push(0.0);
    // identity, column-major
    let mut z = vec![0.0f64; n * n];
    for j in 0..n {
        z[j * n + j] = 1.0;
    }

    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a negligible subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(LabError::SolverError(format!(
                    "QL failed to converge for eigenvalue {l}"
                )));
            }
            // implicit shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation underflow: deflate and restart
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // rotate eigenvector columns i and i+1
                let (lo, hi) = z.split_at_mut((i + 1) * n);
                let zi = &mut lo[i * n..];
                let zi1 = &mut hi[..n];
                for k in 0..n {
                    f = zi1[k];
                    zi1[k] = s * zi[k] + c * f;
                    zi[k] = c * zi[k] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // sort ascending, reorder columns, fix signs
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![0.0f64; n * n];
    for (jnew, &jold) in order.iter().enumerate() {
        values.push(d[jold]);
        let col = &z[jold * n..(jold + 1) * n];
        // deterministic sign: largest-magnitude component positive
        let mut idx = 0;
        let mut best = 0.0f64;
        for (k, &v) in col.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                idx = k;
            }
        }
        let flip = if col[idx] < 0.0 { -1.0 } else { 1.0 };
        let dst = &mut vectors[jnew * n..(jnew + 1) * n];
        for k in 0..n {
            dst[k] = flip * col[k];
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_exact() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let (vals, vecs) = symmetric_tridiagonal_eigen(&[2.0, 2.0], &[1.0]).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[0].abs() - inv_sqrt2).abs() < 1e-14);
        assert!((vecs[1].abs() - inv_sqrt2).abs() < 1e-14);
    }

    #[test]
    fn free_laplacian_matches_sine_modes() {
        // -u'' on a grid with Dirichlet ends: lambda_k = (2/h^2)(1 - cos(k pi h))
        let n = 200;
        let h = 1.0 / (n as f64 + 1.0);
        let d = vec![2.0 / (h * h); n];
        let e = vec![-1.0 / (h * h); n - 1];
        let (vals, vecs) = symmetric_tridiagonal_eigen(&d, &e).unwrap();
        for k in [1usize, 2, 5, 50, 171] {
            let expect = 2.0 / (h * h) * (1.0 - (k as f64 * std::f64::consts::PI * h).cos());
            assert!(
                (vals[k - 1] - expect).abs() < 1e-8 * expect,
                "k={k}: {} vs {expect}",
                vals[k - 1]
            );
        }
        // eigenvector of the lowest mode is the discrete half-sine
        let v0 = &vecs[0..n];
        let norm: f64 = (0..n)
            .map(|i| ((i + 1) as f64 * std::f64::consts::PI * h).sin())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        for (i, v) in v0.iter().enumerate() {
            let expect = ((i + 1) as f64 * std::f64::consts::PI * h).sin() / norm;
            assert!((v - expect).abs() < 1e-9, "component {i}");
        }
    }

    #[test]
    fn orthonormality_and_residual() {
        let n = 300;
        let d: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() * 3.0 + 4.0).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| (i as f64 * 1.3).cos() + 1.5).collect();
        let (vals, vecs) = symmetric_tridiagonal_eigen(&d, &e).unwrap();
        for j in 0..n - 1 {
            assert!(vals[j] <= vals[j + 1]);
        }
        for a in (0..n).step_by(37) {
            for b in (a..n).step_by(53) {
                let dot: f64 = (0..n).map(|k| vecs[a * n + k] * vecs[b * n + k]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-11, "({a},{b}): {dot}");
            }
        }
        for j in [0usize, 100, 299] {
            let v = &vecs[j * n..(j + 1) * n];
            let mut max_res = 0.0f64;
            for k in 0..n {
                let mut av = d[k] * v[k];
                if k > 0 {
                    av += e[k - 1] * v[k - 1];
                }
                if k + 1 < n {
                    av += e[k] * v[k + 1];
                }
                max_res = max_res.max((av - vals[j] * v[k]).abs());
            }
            assert!(
                max_res < 1e-10 * vals[n - 1].abs().max(1.0),
                "j={j}: {max_res}"
            );
        }
    }
}

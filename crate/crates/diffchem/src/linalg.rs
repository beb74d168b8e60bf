//! Small dense linear algebra, generic over the differentiable scalar.
//!
//! The eigensolver is cyclic Jacobi: deterministic, built from smooth
//! elementary operations, so forward-mode tangents flow through it. LAPACK
//! is of no use here because the matrices carry dual numbers.

use ndarray::Array2;

use crate::autodiff::Scalar;
use crate::error::{Error, Result};

pub(crate) fn matmul<S: Scalar>(a: &Array2<S>, b: &Array2<S>) -> Array2<S> {
    let (n, k) = a.dim();
    let (k2, m) = b.dim();
    assert_eq!(k, k2, "matmul shape mismatch");
    Array2::from_shape_fn((n, m), |(i, j)| {
        let mut acc = S::zero();
        for t in 0..k {
            acc = acc + a[(i, t)].clone() * b[(t, j)].clone();
        }
        acc
    })
}

/// `a^T * b`.
pub(crate) fn matmul_tn<S: Scalar>(a: &Array2<S>, b: &Array2<S>) -> Array2<S> {
    let (k, n) = a.dim();
    let (k2, m) = b.dim();
    assert_eq!(k, k2, "matmul_tn shape mismatch");
    Array2::from_shape_fn((n, m), |(i, j)| {
        let mut acc = S::zero();
        for t in 0..k {
            acc = acc + a[(t, i)].clone() * b[(t, j)].clone();
        }
        acc
    })
}

pub(crate) fn max_abs_diff<S: Scalar>(a: &Array2<S>, b: &Array2<S>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x.value() - y.value()).abs())
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and the matching eigenvector
/// columns. The sign of each eigenvector is fixed by making its
/// largest-magnitude component positive (ties broken by lowest index), so
/// the output is deterministic and stable under small perturbations.
pub fn jacobi_eigh<S: Scalar>(matrix: &Array2<S>) -> Result<(Vec<S>, Array2<S>)> {
    let (n, m) = matrix.dim();
    assert_eq!(n, m, "jacobi_eigh needs a square matrix");
    let mut a = matrix.clone();
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            S::one()
        } else {
            S::zero()
        }
    });
    if n == 0 {
        return Ok((Vec::new(), v));
    }

    let scale = a.iter().map(|x| x.value().abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok((vec![S::zero(); n], v));
    }
    let tol = 1e-14 * scale;
    let max_sweeps = 100;

    for sweep in 0..max_sweeps {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].value().abs());
            }
        }
        if off < tol {
            break;
        }
        if sweep == max_sweeps - 1 {
            return Err(Error::EigenNonConvergence(format!(
                "off-diagonal {off:.3e} after {max_sweeps} sweeps"
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)].clone();
                // Rotations on entries that are exactly zero at the primal
                // level would divide 0/0 in tau; they are no-ops anyway.
                if apq.value().abs() < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].clone();
                let aqq = a[(q, q)].clone();
                let tau = (aqq - app) / apq.clone().scale(2.0);
                // t = sign(tau) / (|tau| + sqrt(1 + tau^2)), the smaller root
                // of t^2 + 2 tau t - 1 = 0.
                let root = (tau.clone() * tau.clone() + S::one()).sqrt();
                let t = if tau.value() >= 0.0 {
                    (tau.clone() + root).recip()
                } else {
                    -((root - tau.clone()).recip())
                };
                let c = (t.clone() * t.clone() + S::one()).sqrt().recip();
                let s = t.clone() * c.clone();

                for k in 0..n {
                    let akp = a[(k, p)].clone();
                    let akq = a[(k, q)].clone();
                    a[(k, p)] = akp.clone() * c.clone() - akq.clone() * s.clone();
                    a[(k, q)] = akp * s.clone() + akq * c.clone();
                }
                for k in 0..n {
                    let apk = a[(p, k)].clone();
                    let aqk = a[(q, k)].clone();
                    a[(p, k)] = apk.clone() * c.clone() - aqk.clone() * s.clone();
                    a[(q, k)] = apk * s.clone() + aqk * c.clone();
                }
                for k in 0..n {
                    let vkp = v[(k, p)].clone();
                    let vkq = v[(k, q)].clone();
                    v[(k, p)] = vkp.clone() * c.clone() - vkq.clone() * s.clone();
                    v[(k, q)] = vkp * s.clone() + vkq * c.clone();
                }
            }
        }
    }

    // Sort ascending by primal eigenvalue, then fix signs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .value()
            .partial_cmp(&a[(j, j)].value())
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<S> = order.iter().map(|&i| a[(i, i)].clone()).collect();
    let mut vectors = Array2::from_shape_fn((n, n), |(r, c)| v[(r, order[c])].clone());
    for c in 0..n {
        let mut best = 0;
        let mut best_abs = vectors[(0, c)].value().abs();
        for r in 1..n {
            let m = vectors[(r, c)].value().abs();
            if m > best_abs + 1e-300 {
                best = r;
                best_abs = m;
            }
        }
        if vectors[(best, c)].value() < 0.0 {
            for r in 0..n {
                vectors[(r, c)] = -vectors[(r, c)].clone();
            }
        }
    }
    Ok((eigenvalues, vectors))
}

/// Solves `A x = b` for square `A` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `tol`.
pub fn solve_dense(a: &Array2<f64>, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.dim(), (n, n));
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if m[(r, col)].abs() > m[(pivot, col)].abs() {
                pivot = r;
            }
        }
        if m[(pivot, col)].abs() < tol {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                let tmp = m[(col, c)];
                m[(col, c)] = m[(pivot, c)];
                m[(pivot, c)] = tmp;
            }
            rhs.swap(col, pivot);
        }
        for r in (col + 1)..n {
            let f = m[(r, col)] / m[(col, col)];
            for c in col..n {
                m[(r, c)] -= f * m[(col, c)];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..n {
            acc -= m[(row, c)] * x[c];
        }
        x[row] = acc / m[(row, row)];
    }
    Some(x)
}

/// Least-squares pseudo-solve of a symmetric system via eigendecomposition,
/// dropping singular directions with |eigenvalue| below `cutoff`.
pub fn pseudo_solve_symmetric(a: &Array2<f64>, b: &[f64], cutoff: f64) -> Result<Vec<f64>> {
    let (evals, vecs) = jacobi_eigh(a)?;
    let n = b.len();
    let mut x = vec![0.0; n];
    for (k, lam) in evals.iter().enumerate() {
        if lam.abs() < cutoff {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..n {
            proj += vecs[(i, k)] * b[i];
        }
        let w = proj / lam;
        for i in 0..n {
            x[i] += w * vecs[(i, k)];
        }
    }
    Ok(x)
}

//! Forward-mode automatic differentiation over a generic scalar.
//!
//! Every numeric kernel in this crate is generic over [`Scalar`], so the
//! same code evaluates with plain `f64` or with [`Dual`] numbers carrying
//! directional derivatives. Gradients are exact to roundoff; Hessians come
//! from forward-over-forward nesting (`Dual<Dual<f64>>`).
//!
//! Branch conditions always compare primal values; tangents follow the
//! branch that was taken.

mod dual;

pub use dual::Dual;

use crate::error::{Error, Result};
use ndarray::Array2;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// The elementary-operation set the differentiable kernels are written in.
///
/// Implemented by `f64` (primal evaluation) and by [`Dual<S>`] for any
/// scalar `S`, which is what makes nesting work.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Sized
{
    /// Lifts an `f64` constant (zero tangents).
    fn constant(c: f64) -> Self;
    /// Primal value, recursing through nested duals.
    fn value(&self) -> f64;
    /// Largest absolute component carried by this scalar: the primal value
    /// and, for duals, every tangent. Pruning on this instead of the primal
    /// keeps terms whose value vanishes but whose derivative does not.
    fn mag(&self) -> f64 {
        self.value().abs()
    }
    /// Multiplication by an `f64` constant.
    fn scale(&self, c: f64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// `self^p` for a constant exponent.
    fn powf(&self, p: f64) -> Self;
    fn erf(&self) -> Self;
    fn abs(&self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }
    fn one() -> Self {
        Self::constant(1.0)
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn erf(&self) -> Self {
        libm::erf(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// How a derivative request should be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    Gradient,
    Jacobian,
    Hessian,
}

/// Seeding configuration for a derivative computation.
#[derive(Debug, Clone, Copy)]
pub struct DiffConfig {
    pub n_directions: usize,
    pub mode: DiffMode,
}

impl DiffConfig {
    pub fn new(n_directions: usize, mode: DiffMode) -> Result<Self> {
        if n_directions == 0 {
            return Err(Error::Input("n_directions must be at least 1".into()));
        }
        Ok(DiffConfig { n_directions, mode })
    }
}

/// Lifts `x` into dual numbers seeded with the identity directions.
pub fn seed<S: Scalar>(x: &[S]) -> Vec<Dual<S>> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, xi)| Dual::variable(xi.clone(), i, n))
        .collect()
}

fn check_finite(label: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{label} evaluated to {v}")))
    }
}

/// Gradient of a scalar function at `x0`, exact to roundoff.
pub fn grad<F>(f: F, x0: &[f64]) -> Result<Vec<f64>>
where
    F: FnOnce(&[Dual<f64>]) -> Dual<f64>,
{
    let out = f(&seed(x0));
    check_finite("function value", out.value)?;
    let mut g = vec![0.0; x0.len()];
    for (i, gi) in g.iter_mut().enumerate() {
        *gi = out.tangent(i);
        check_finite("gradient component", *gi)?;
    }
    Ok(g)
}

/// Gradient evaluated over a generic scalar, so the result itself can be
/// differentiated again (`jacobian` of `grad_generic` equals `hessian`).
pub fn grad_generic<S: Scalar, F>(f: F, x: &[S]) -> Vec<S>
where
    F: FnOnce(&[Dual<S>]) -> Dual<S>,
{
    let out = f(&seed(x));
    (0..x.len()).map(|i| out.tangent(i)).collect()
}

/// Jacobian of a vector-valued function: rows index outputs, columns inputs.
pub fn jacobian<F>(f: F, x0: &[f64]) -> Result<Array2<f64>>
where
    F: FnOnce(&[Dual<f64>]) -> Vec<Dual<f64>>,
{
    let out = f(&seed(x0));
    let mut jac = Array2::zeros((out.len(), x0.len()));
    for (r, o) in out.iter().enumerate() {
        check_finite("function value", o.value)?;
        for c in 0..x0.len() {
            let t = o.tangent(c);
            check_finite("jacobian entry", t)?;
            jac[(r, c)] = t;
        }
    }
    Ok(jac)
}

/// Hessian by forward-over-forward nesting, symmetrized as `(H + H^T)/2`.
///
/// Also returns the maximum asymmetry of the raw result, which is a pure
/// roundoff diagnostic for twice-differentiable inputs.
pub fn hessian_with_asymmetry<F>(f: F, x0: &[f64]) -> Result<(Array2<f64>, f64)>
where
    F: FnOnce(&[Dual<Dual<f64>>]) -> Dual<Dual<f64>>,
{
    let n = x0.len();
    let vars: Vec<Dual<Dual<f64>>> = x0
        .iter()
        .enumerate()
        .map(|(i, &xi)| Dual::variable(Dual::variable(xi, i, n), i, n))
        .collect();
    let out = f(&vars);
    check_finite("function value", out.value())?;
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        let ti = out.tangent(i);
        for j in 0..n {
            let hij = ti.tangent(j);
            check_finite("hessian entry", hij)?;
            h[(i, j)] = hij;
        }
    }
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    let sym = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (h[(i, j)] + h[(j, i)]));
    Ok((sym, asym))
}

/// Symmetric Hessian of a scalar function at `x0`.
pub fn hessian<F>(f: F, x0: &[f64]) -> Result<Array2<f64>>
where
    F: FnOnce(&[Dual<Dual<f64>>]) -> Dual<Dual<f64>>,
{
    hessian_with_asymmetry(f, x0).map(|(h, _)| h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grad_square() {
        let g = grad(|x| x[0].clone() * x[0].clone(), &[3.0]).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn grad_x_exp_y() {
        // f(x, y) = x * exp(y) at (2, 0) -> (1, 2)
        let g = grad(|v| v[0].clone() * v[1].exp(), &[2.0, 0.0]).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-14);
        assert!((g[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobian_x_and_x_squared() {
        let j = jacobian(|v| vec![v[0].clone(), v[0].clone() * v[0].clone()], &[2.0]).unwrap();
        assert_eq!(j.dim(), (2, 1));
        assert!((j[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((j[(1, 0)] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn jacobian_identity_map() {
        let j = jacobian(|v| v.to_vec(), &[1.0, 2.0, 3.0]).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let expected = if i == k { 1.0 } else { 0.0 };
                assert!((j[(i, k)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hessian_x2y() {
        // f(x, y) = x^2 y at (1, 1) -> [[2, 2], [2, 0]]
        let (h, asym) = hessian_with_asymmetry(
            |v| v[0].clone() * v[0].clone() * v[1].clone(),
            &[1.0, 1.0],
        )
        .unwrap();
        assert!(asym < 1e-12);
        assert!((h[(0, 0)] - 2.0).abs() < 1e-13);
        assert!((h[(0, 1)] - 2.0).abs() < 1e-13);
        assert!((h[(1, 0)] - 2.0).abs() < 1e-13);
        assert!(h[(1, 1)].abs() < 1e-13);
    }

    #[test]
    fn hessian_quadratic_form() {
        // f(x) = x^T A x with symmetric A -> Hessian 2A
        let a = [[2.0, 0.5, -1.0], [0.5, 3.0, 0.25], [-1.0, 0.25, 1.5]];
        let h = hessian(
            |v| {
                let mut acc = Dual::constant(0.0);
                for i in 0..3 {
                    for j in 0..3 {
                        acc = acc + v[i].clone().scale(a[i][j]) * v[j].clone();
                    }
                }
                acc
            },
            &[0.3, -0.7, 1.1],
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((h[(i, j)] - 2.0 * a[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_direction_seed_gives_zero_tangents() {
        let x = Dual::new(1.7, vec![0.0, 0.0]);
        let y = (x.clone() * x.clone() + x.clone().exp()).sqrt().ln();
        assert_eq!(y.tangents, vec![0.0, 0.0]);
    }

    #[test]
    fn nesting_consistency_matches_jacobian_of_gradient() {
        // hessian(f) == jacobian(x -> grad f(x)) for f = x0^2 * exp(x1)
        fn f<S: Scalar>(v: &[S]) -> S {
            v[0].clone() * v[0].clone() * v[1].exp()
        }
        let x0 = [0.8, -0.4];
        let h = hessian(|v| f(v), &x0).unwrap();
        let j = jacobian(|v| grad_generic(|w| f(w), v), &x0).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!((h[(i, k)] - j[(i, k)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_finite_is_reported() {
        let err = grad(|x| x[0].clone().ln(), &[-1.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn diff_config_rejects_zero_directions() {
        assert!(DiffConfig::new(0, DiffMode::Gradient).is_err());
        assert!(DiffConfig::new(3, DiffMode::Hessian).is_ok());
    }
}

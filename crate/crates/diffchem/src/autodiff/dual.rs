//! Forward-mode dual numbers with a runtime-sized tangent vector.
//!
//! A `Dual<S>` carries a primal value and one tangent slot per seeded
//! direction. Nesting (`Dual<Dual<f64>>`) yields second derivatives. An
//! empty tangent vector denotes a constant, so lifting literals into a
//! computation never allocates per-direction storage.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub value: S,
    pub tangents: Vec<S>,
}

impl<S: Scalar> Dual<S> {
    pub fn new(value: S, tangents: Vec<S>) -> Self {
        Dual { value, tangents }
    }

    /// A variable seeded along direction `dir` out of `n_directions`.
    pub fn variable(value: S, dir: usize, n_directions: usize) -> Self {
        let mut tangents = vec![S::constant(0.0); n_directions];
        tangents[dir] = S::constant(1.0);
        Dual { value, tangents }
    }

    /// Tangent along direction `dir`; zero for constants.
    pub fn tangent(&self, dir: usize) -> S {
        self.tangents
            .get(dir)
            .cloned()
            .unwrap_or_else(|| S::constant(0.0))
    }

    pub fn n_directions(&self) -> usize {
        self.tangents.len()
    }

    /// Applies the chain rule: maps `self` through a function with value
    /// `value` and local derivative `dfdx` at the primal point.
    fn chain(&self, value: S, dfdx: S) -> Self {
        Dual {
            value,
            tangents: self
                .tangents
                .iter()
                .map(|t| t.clone() * dfdx.clone())
                .collect(),
        }
    }
}

fn zip_tangents<S: Scalar>(a: &[S], b: &[S], f: impl Fn(&S, &S) -> S) -> Vec<S> {
    debug_assert!(
        a.is_empty() || b.is_empty() || a.len() == b.len(),
        "tangent vectors of mismatched lengths: {} vs {}",
        a.len(),
        b.len()
    );
    if a.is_empty() {
        let zero = S::constant(0.0);
        return b.iter().map(|tb| f(&zero, tb)).collect();
    }
    if b.is_empty() {
        let zero = S::constant(0.0);
        return a.iter().map(|ta| f(ta, &zero)).collect();
    }
    a.iter().zip(b.iter()).map(|(ta, tb)| f(ta, tb)).collect()
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Dual<S>;
    fn add(self, rhs: Dual<S>) -> Dual<S> {
        Dual {
            value: self.value.clone() + rhs.value.clone(),
            tangents: zip_tangents(&self.tangents, &rhs.tangents, |a, b| a.clone() + b.clone()),
        }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Dual<S>;
    fn sub(self, rhs: Dual<S>) -> Dual<S> {
        Dual {
            value: self.value.clone() - rhs.value.clone(),
            tangents: zip_tangents(&self.tangents, &rhs.tangents, |a, b| a.clone() - b.clone()),
        }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Dual<S>;
    fn mul(self, rhs: Dual<S>) -> Dual<S> {
        let tangents = zip_tangents(&self.tangents, &rhs.tangents, |a, b| {
            a.clone() * rhs.value.clone() + self.value.clone() * b.clone()
        });
        Dual {
            value: self.value * rhs.value,
            tangents,
        }
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Dual<S>;
    fn div(self, rhs: Dual<S>) -> Dual<S> {
        let q = self.value.clone() / rhs.value.clone();
        let tangents = zip_tangents(&self.tangents, &rhs.tangents, |a, b| {
            (a.clone() - q.clone() * b.clone()) / rhs.value.clone()
        });
        Dual { value: q, tangents }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Dual<S>;
    fn neg(self) -> Dual<S> {
        Dual {
            value: -self.value,
            tangents: self.tangents.into_iter().map(|t| -t).collect(),
        }
    }
}

/// Ordering compares primal values only; branches taken on a `Dual`
/// follow the primal, and tangents follow the taken branch.
impl<S: Scalar> PartialOrd for Dual<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.value().partial_cmp(&other.value.value())
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn constant(c: f64) -> Self {
        Dual {
            value: S::constant(c),
            tangents: Vec::new(),
        }
    }

    fn value(&self) -> f64 {
        self.value.value()
    }

    fn mag(&self) -> f64 {
        self.tangents
            .iter()
            .map(|t| t.mag())
            .fold(self.value.mag(), f64::max)
    }

    fn scale(&self, c: f64) -> Self {
        Dual {
            value: self.value.scale(c),
            tangents: self.tangents.iter().map(|t| t.scale(c)).collect(),
        }
    }

    fn recip(&self) -> Self {
        let v = self.value.recip();
        // d(1/x) = -dx / x^2
        let d = -(v.clone() * v.clone());
        self.chain(v, d)
    }

    fn sqrt(&self) -> Self {
        let v = self.value.sqrt();
        let d = v.recip().scale(0.5);
        self.chain(v, d)
    }

    fn exp(&self) -> Self {
        let v = self.value.exp();
        self.chain(v.clone(), v)
    }

    fn ln(&self) -> Self {
        let v = self.value.ln();
        self.chain(v, self.value.recip())
    }

    fn powi(&self, n: i32) -> Self {
        let v = self.value.powi(n);
        let d = self.value.powi(n - 1).scale(n as f64);
        self.chain(v, d)
    }

    fn powf(&self, p: f64) -> Self {
        let v = self.value.powf(p);
        let d = self.value.powf(p - 1.0).scale(p);
        self.chain(v, d)
    }

    fn erf(&self) -> Self {
        let v = self.value.erf();
        // d erf(x)/dx = 2/sqrt(pi) * exp(-x^2)
        let d = (-(self.value.clone() * self.value.clone()))
            .exp()
            .scale(2.0 / std::f64::consts::PI.sqrt());
        self.chain(v, d)
    }

    fn abs(&self) -> Self {
        if self.value.value() < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

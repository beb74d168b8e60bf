//! Independent numerical oracles for the diffchem test suites.
//!
//! Everything here deliberately avoids the code paths of the library under
//! test: integrals are done by quadrature or one-dimensional integral
//! representations instead of Hermite recursions, eigenvalues by a
//! textbook atan2-based Jacobi sweep, derivatives by central finite
//! differences, and fermionic operators by their direct action on
//! occupation-number basis states. Inputs are plain `f64` data.

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative by upward recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Nodes and weights mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| t * half).collect(),
    )
}

// ---------------------------------------------------------------------------
// Gaussian basis functions as plain data

/// A contracted Cartesian Gaussian with all normalization folded into the
/// effective coefficients: value = sum_k c_k (x-X)^l (y-Y)^m (z-Z)^n
/// exp(-a_k |r-R|^2).
#[derive(Clone, Debug)]
pub struct GaussianShell {
    pub center: [f64; 3],
    pub angular: [usize; 3],
    /// (exponent, effective coefficient) pairs.
    pub primitives: Vec<(f64, f64)>,
}

impl GaussianShell {
    pub fn value(&self, r: [f64; 3]) -> f64 {
        let dx = r[0] - self.center[0];
        let dy = r[1] - self.center[1];
        let dz = r[2] - self.center[2];
        let r2 = dx * dx + dy * dy + dz * dz;
        let ang = dx.powi(self.angular[0] as i32)
            * dy.powi(self.angular[1] as i32)
            * dz.powi(self.angular[2] as i32);
        let mut acc = 0.0;
        for &(alpha, coeff) in &self.primitives {
            acc += coeff * (-alpha * r2).exp();
        }
        ang * acc
    }
}

/// 1-D factor of one primitive: (x - center)^l exp(-alpha (x - center)^2).
fn primitive_1d(l: usize, alpha: f64, center: f64, x: f64) -> f64 {
    (x - center).powi(l as i32) * (-alpha * (x - center) * (x - center)).exp()
}

/// Its derivative: [l t^(l-1) - 2 alpha t^(l+1)] exp(-alpha t^2), t = x - c.
fn primitive_1d_derivative(l: usize, alpha: f64, center: f64, x: f64) -> f64 {
    let t = x - center;
    let gauss = (-alpha * t * t).exp();
    let poly = if l == 0 {
        -2.0 * alpha * t
    } else {
        l as f64 * t.powi(l as i32 - 1) - 2.0 * alpha * t.powi(l as i32 + 1)
    };
    poly * gauss
}

/// Integration interval centered on the Gaussian product: the pair decays
/// like exp(-p (x - P)^2) with p = aa + ab, so a window of a few product
/// widths captures everything while staying narrow enough for the nodes
/// to resolve the peak.
fn axis_interval(aa: f64, ab: f64, ca: f64, cb: f64) -> (f64, f64) {
    let p = aa + ab;
    let center = (aa * ca + ab * cb) / p;
    // exp(-80) at the window edge buries any polynomial factor; a larger
    // additive margin would only blunt the node resolution of the peak
    let width = (80.0 / p).sqrt();
    (center - width, center + width)
}

const NODES_1D: usize = 160;

/// Overlap of two shells by per-primitive separable 1-D quadrature.
pub fn overlap_quadrature(a: &GaussianShell, b: &GaussianShell) -> f64 {
    let mut total = 0.0;
    for &(aa, ca) in &a.primitives {
        for &(ab, cb) in &b.primitives {
            let mut prod = ca * cb;
            for axis in 0..3 {
                let (lo, hi) = axis_interval(aa, ab, a.center[axis], b.center[axis]);
                let (x, w) = gauss_legendre_on(NODES_1D, lo, hi);
                let mut acc = 0.0;
                for (xi, wi) in x.iter().zip(&w) {
                    acc += wi
                        * primitive_1d(a.angular[axis], aa, a.center[axis], *xi)
                        * primitive_1d(b.angular[axis], ab, b.center[axis], *xi);
                }
                prod *= acc;
            }
            total += prod;
        }
    }
    total
}

/// Kinetic energy 0.5 <grad a, grad b> by separable 1-D quadrature.
pub fn kinetic_quadrature(a: &GaussianShell, b: &GaussianShell) -> f64 {
    let mut total = 0.0;
    for &(aa, ca) in &a.primitives {
        for &(ab, cb) in &b.primitives {
            // per-axis plain overlaps and derivative overlaps
            let mut s = [0.0; 3];
            let mut d = [0.0; 3];
            for axis in 0..3 {
                let (lo, hi) = axis_interval(aa, ab, a.center[axis], b.center[axis]);
                let (x, w) = gauss_legendre_on(NODES_1D, lo, hi);
                let (mut acc_s, mut acc_d) = (0.0, 0.0);
                for (xi, wi) in x.iter().zip(&w) {
                    let fa = primitive_1d(a.angular[axis], aa, a.center[axis], *xi);
                    let fb = primitive_1d(b.angular[axis], ab, b.center[axis], *xi);
                    let ga = primitive_1d_derivative(a.angular[axis], aa, a.center[axis], *xi);
                    let gb = primitive_1d_derivative(b.angular[axis], ab, b.center[axis], *xi);
                    acc_s += wi * fa * fb;
                    acc_d += wi * ga * gb;
                }
                s[axis] = acc_s;
                d[axis] = acc_d;
            }
            total += ca
                * cb
                * 0.5
                * (d[0] * s[1] * s[2] + s[0] * d[1] * s[2] + s[0] * s[1] * d[2]);
        }
    }
    total
}

/// `-Z * integral of a(r) b(r) / |r - nucleus|` via the Gaussian
/// transform `1/|r-C| = 2/sqrt(pi) int_0^inf exp(-u^2 |r-C|^2) du`:
/// the inner integral is a separable product of 1-D polynomial-times-
/// Gaussian quadratures, and the outer u integral is mapped to [0, 1)
/// with u = t/(1-t). Every window tracks its Gaussian product, so sharp
/// off-center functions stay resolved at any angular momentum.
pub fn attraction_quadrature(
    a: &GaussianShell,
    b: &GaussianShell,
    nucleus: [f64; 3],
    charge: f64,
) -> f64 {
    let (ts, wt) = gauss_legendre_on(240, 0.0, 1.0);
    let (base_x, base_w) = gauss_legendre(160);

    let mut total = 0.0;
    for &(aa, ca) in &a.primitives {
        for &(ab, cb) in &b.primitives {
            let mut pair = 0.0;
            for (t, wt) in ts.iter().zip(&wt) {
                let u = t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                let u2 = u * u;
                let q = aa + ab + u2;
                let width = (80.0 / q).sqrt();
                let mut g = 1.0;
                for axis in 0..3 {
                    let (ca_x, cb_x, cc_x) =
                        (a.center[axis], b.center[axis], nucleus[axis]);
                    let center = (aa * ca_x + ab * cb_x + u2 * cc_x) / q;
                    let (lo, hi) = (center - width, center + width);
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (lo + hi);
                    let mut acc = 0.0;
                    for (xn, wn) in base_x.iter().zip(&base_w) {
                        let x = mid + half * xn;
                        let (da, db, dc) = (x - ca_x, x - cb_x, x - cc_x);
                        acc += wn
                            * half
                            * da.powi(a.angular[axis] as i32)
                            * db.powi(b.angular[axis] as i32)
                            * (-aa * da * da - ab * db * db - u2 * dc * dc).exp();
                    }
                    g *= acc;
                }
                pair += wt * jac * g;
            }
            total += ca * cb * pair;
        }
    }
    -charge * 2.0 / std::f64::consts::PI.sqrt() * total
}

/// `F_0(t) = int_0^1 exp(-t u^2) du` by Gauss-Legendre, avoiding the
/// series and recursion routes entirely.
fn boys0_quadrature(t: f64) -> f64 {
    let (x, w) = gauss_legendre_on(200, 0.0, 1.0);
    x.iter()
        .zip(&w)
        .map(|(u, wu)| wu * (-t * u * u).exp())
        .sum()
}

/// Electron repulsion integral `(ab|cd)` in chemist ordering for pure
/// s-type shells: the separable closed form with the auxiliary integral
/// evaluated by quadrature.
pub fn eri_s_quadrature(
    a: &GaussianShell,
    b: &GaussianShell,
    c: &GaussianShell,
    d: &GaussianShell,
) -> f64 {
    for s in [a, b, c, d] {
        assert_eq!(s.angular, [0, 0, 0], "oracle handles s shells only");
    }
    let dist2 = |u: [f64; 3], v: [f64; 3]| -> f64 {
        (0..3).map(|k| (u[k] - v[k]).powi(2)).sum()
    };
    let mut total = 0.0;
    for &(aa, ca) in &a.primitives {
        for &(ab, cb) in &b.primitives {
            for &(ac, cc) in &c.primitives {
                for &(ad, cd) in &d.primitives {
                    let p = aa + ab;
                    let q = ac + ad;
                    let pp: [f64; 3] =
                        std::array::from_fn(|k| (aa * a.center[k] + ab * b.center[k]) / p);
                    let qq: [f64; 3] =
                        std::array::from_fn(|k| (ac * c.center[k] + ad * d.center[k]) / q);
                    let omega = p * q / (p + q);
                    let pref = 2.0 * std::f64::consts::PI.powi(5).sqrt()
                        / (p * q * (p + q).sqrt());
                    let gauss_ab = (-aa * ab / p * dist2(a.center, b.center)).exp();
                    let gauss_cd = (-ac * ad / q * dist2(c.center, d.center)).exp();
                    total += ca
                        * cb
                        * cc
                        * cd
                        * pref
                        * gauss_ab
                        * gauss_cd
                        * boys0_quadrature(omega * dist2(pp, qq));
                }
            }
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver (textbook Jacobi, atan2 angles)

/// Eigenvalues (ascending) and eigenvector columns of a symmetric matrix.
pub fn dense_sym_eig(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..200 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vecs: Vec<Vec<f64>> = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (evals, vecs)
}

// ---------------------------------------------------------------------------
// Finite differences

pub fn central_gradient(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut xs = x.to_vec();
    for i in 0..x.len() {
        xs[i] = x[i] + h;
        let plus = f(&xs);
        xs[i] = x[i] - h;
        let minus = f(&xs);
        xs[i] = x[i];
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

pub fn central_hessian(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let f0 = f(x);
    let mut hess = vec![vec![0.0; n]; n];
    let mut xs = x.to_vec();
    for i in 0..n {
        xs[i] = x[i] + h;
        let fp = f(&xs);
        xs[i] = x[i] - h;
        let fm = f(&xs);
        xs[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..n {
            xs[i] = x[i] + h;
            xs[j] = x[j] + h;
            let fpp = f(&xs);
            xs[j] = x[j] - h;
            let fpm = f(&xs);
            xs[i] = x[i] - h;
            let fmm = f(&xs);
            xs[j] = x[j] + h;
            let fmp = f(&xs);
            xs[i] = x[i];
            xs[j] = x[j];
            let d = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[i][j] = d;
            hess[j][i] = d;
        }
    }
    hess
}

// ---------------------------------------------------------------------------
// Occupation-basis fermionic operators

/// Dense matrix of a ladder operator on `n` spin-orbitals in the
/// occupation basis, with orbital 0 stored in the most significant bit of
/// the basis index. The fermionic phase is the parity of the occupations
/// strictly before the acted orbital, which is the reading of the
/// ladder-action phase consistent with the canonical anticommutation
/// relations.
pub fn ladder_matrix(n: usize, orbital: usize, dagger: bool) -> Vec<Vec<f64>> {
    let dim = 1usize << n;
    let mut m = vec![vec![0.0; dim]; dim];
    let bit = |state: usize, k: usize| (state >> (n - 1 - k)) & 1;
    for col in 0..dim {
        let occupied = bit(col, orbital) == 1;
        if dagger == occupied {
            continue; // annihilating empty or creating occupied gives zero
        }
        let mut parity = 0u32;
        for k in 0..orbital {
            parity += bit(col, k) as u32;
        }
        let row = col ^ (1 << (n - 1 - orbital));
        m[row][col] = if parity % 2 == 0 { 1.0 } else { -1.0 };
    }
    m
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t] == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

pub fn mat_add_scaled(a: &mut [Vec<f64>], b: &[Vec<f64>], factor: f64) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += factor * y;
        }
    }
}

pub fn identity_matrix(dim: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// Dense matrix of a product of ladder factors (leftmost factor applied
/// last, i.e. ordinary operator-product order).
pub fn fermion_product_matrix(n: usize, factors: &[(usize, bool)]) -> Vec<Vec<f64>> {
    let mut m = identity_matrix(1 << n);
    for &(orbital, dagger) in factors.iter().rev() {
        m = mat_mul(&ladder_matrix(n, orbital, dagger), &m);
    }
    m
}

// ---------------------------------------------------------------------------
// Scalar minimization

/// Golden-section minimum of a unimodal function on [a, b].
pub fn golden_section_min(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

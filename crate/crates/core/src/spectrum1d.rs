//! Maxwell eigenpairs on the half circle `φ ∈ (0, π)`: the field `E` vanishes
//! at `φ = π` and has vanishing derivative at `φ = 0`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::Expr;
use crate::linalg::{fit_line, LineFit, SymTridiagonal};
use crate::polar::{phi, CircleForm};
use crate::quadrature::simpson;
use crate::C64;

/// Largest mode count accepted by [`orthonormality_gram`].
pub const GRAM_MAX_MODES: usize = 20;

/// Unit-norm constant `√(2/π)` of the angular eigenfunctions.
pub fn normalization() -> f64 {
    (2.0 / PI).sqrt()
}

/// Closed-form half-circle eigenpair of mode `n`.
#[derive(Clone, Debug)]
pub struct EigenPair1D {
    pub n: usize,
    pub omega: f64,
    pub normalization: f64,
}

impl EigenPair1D {
    /// `E = c cos(ωφ)`, a 0-form.
    pub fn e_field(&self) -> CircleForm {
        CircleForm { degree: 0, coeff: (phi() * self.omega).cos() * self.normalization }
    }

    /// `H = −i c sin(ωφ) dφ`, a 1-form.
    pub fn h_field(&self) -> CircleForm {
        CircleForm { degree: 1, coeff: (phi() * self.omega).sin().scale(C64::new(0.0, -self.normalization)) }
    }

    /// The same pair with every field multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { normalization: self.normalization * s, ..self.clone() }
    }

    pub fn e_at(&self, angle: f64) -> f64 {
        self.normalization * (self.omega * angle).cos()
    }

    pub fn h_at(&self, angle: f64) -> C64 {
        C64::new(0.0, -self.normalization * (self.omega * angle).sin())
    }
}

pub fn analytic_pair(n: usize) -> Result<EigenPair1D> {
    if n < 1 {
        return Err(Error::InvalidArgument("mode index must be at least 1".into()));
    }
    Ok(EigenPair1D { n, omega: n as f64 - 0.5, normalization: normalization() })
}

/// One discrete eigenpair: `λ ≈ ω²` and nodal values at `φ_j = jπ/M`,
/// `j = 0..M−1`, normalized in the trapezoidal inner product and positive at `φ = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct FdEigenpair {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

/// The symmetrized second-difference matrix for `−e″` with a mirror row at
/// `φ = 0` and `e(π) = 0`, on a vertex grid of spacing `π/M`. Row 0 of the
/// unsymmetrized stencil is `(2u₀ − 2u₁)/h²`; scaling `u₀` by `1/√2` makes it
/// symmetric.
pub fn angular_matrix(m: usize, length: f64) -> SymTridiagonal {
    let h = length / m as f64;
    let h2 = h * h;
    let diag = vec![2.0 / h2; m];
    let mut off = vec![-1.0 / h2; m - 1];
    if m > 1 {
        off[0] = -std::f64::consts::SQRT_2 / h2;
    }
    SymTridiagonal { diag, off }
}

pub fn fd_eigensolve(m: usize, count: usize) -> Result<Vec<FdEigenpair>> {
    if m < 16 {
        return Err(Error::InvalidArgument(format!("grid needs at least 16 points, got {m}")));
    }
    let t = angular_matrix(m, PI);
    let h = PI / m as f64;
    let lambdas = t.smallest_eigenvalues(count)?;
    Ok(lambdas
        .into_iter()
        .map(|lambda| {
            let mut v = t.eigenvector(lambda);
            v[0] *= std::f64::consts::SQRT_2;
            let norm = (trapezoid_weights(m, h).iter().zip(&v).map(|(w, x)| w * x * x).sum::<f64>()).sqrt();
            let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
            v.iter_mut().for_each(|x| *x *= sign / norm);
            FdEigenpair { lambda, vector: v }
        })
        .collect())
}

fn trapezoid_weights(m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; m];
    w[0] = 0.5 * h;
    w
}

/// Convergence of the first `count` discrete eigenvalues: a fit of
/// `log max_k |λ_k − (k − 1/2)²|` against `log h`, whose slope is the order.
pub fn convergence_fit(grids: &[usize], count: usize) -> Result<LineFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &m in grids {
        let pairs = fd_eigensolve(m, count)?;
        let err = pairs
            .iter()
            .enumerate()
            .map(|(k, p)| (p.lambda - (k as f64 + 0.5).powi(2)).abs())
            .fold(0.0, f64::max);
        xs.push((PI / m as f64).ln());
        ys.push(err.ln());
    }
    Ok(fit_line(&xs, &ys))
}

/// How derivatives are taken in [`maxwell_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Derivatives {
    /// Exact partials of the closed forms.
    Analytic,
    /// Centered differences with step `π/M`.
    FiniteDifference(usize),
}

/// Discrete `L²(0, π)` norms of `rot E + iωH` and `div H + iωE`, sampled at
/// the interior nodes `jπ/M`, `j = 1..M−1` (the `M` of the FD variant, or
/// 1000 for analytic derivatives).
pub fn maxwell_residual(pair: &EigenPair1D, derivatives: Derivatives) -> (f64, f64) {
    let m = match derivatives {
        Derivatives::Analytic => 1000,
        Derivatives::FiniteDifference(m) => m,
    };
    let h = PI / m as f64;
    let iw = C64::new(0.0, pair.omega);
    let (e, hf) = (pair.e_field(), pair.h_field());
    let (rot_e, div_h) = (e.rot(), hf.div());
    let at = |f: &Expr, x: f64| f.eval(&[1.0, x]);
    let mut acc = (0.0, 0.0);
    for j in 1..m {
        let x = j as f64 * h;
        let (re, dh) = match derivatives {
            Derivatives::Analytic => (at(&rot_e.coeff, x), at(&div_h.coeff, x)),
            Derivatives::FiniteDifference(_) => (
                (at(&e.coeff, x + h) - at(&e.coeff, x - h)) / (2.0 * h),
                (at(&hf.coeff, x + h) - at(&hf.coeff, x - h)) / (2.0 * h),
            ),
        };
        acc.0 += (re + iw * at(&hf.coeff, x)).norm_sqr() * h;
        acc.1 += (dh + iw * at(&e.coeff, x)).norm_sqr() * h;
    }
    (acc.0.sqrt(), acc.1.sqrt())
}

/// `max |G − I|` for the Gram matrix of the first `count` normalized
/// angular functions, integrated by composite Simpson with `intervals` subintervals.
pub fn orthonormality_gram(count: usize, intervals: usize) -> Result<f64> {
    if count > GRAM_MAX_MODES {
        return Err(Error::InvalidArgument(format!("at most {GRAM_MAX_MODES} modes, got {count}")));
    }
    let pairs: Vec<EigenPair1D> = (1..=count).map(analytic_pair).collect::<Result<_>>()?;
    let mut dev = 0.0f64;
    for (a, pa) in pairs.iter().enumerate() {
        for (b, pb) in pairs.iter().enumerate().skip(a) {
            let g: f64 = simpson(0.0, PI, intervals, |x| pa.e_at(x) * pb.e_at(x));
            let target = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((g - target).abs());
        }
    }
    Ok(dev)
}

/// Dimension of the discrete harmonic space for degree 1: the kernel of the
/// forward difference on nodal 0-form potentials pinned to zero at the
/// `φ = 0` endpoint, counted as eigenvalues of `DᵀD` below `tol`.
pub fn harmonic_kernel_dimension(m: usize, tol: f64) -> Result<usize> {
    if m < 2 {
        return Err(Error::InvalidArgument("need at least two cells".into()));
    }
    let h2 = (PI / m as f64).powi(2);
    // Unknowns u_1..u_M; u_0 = 0. DᵀD is the Dirichlet/Neumann second difference.
    let mut diag = vec![2.0 / h2; m];
    diag[m - 1] = 1.0 / h2;
    let t = SymTridiagonal::new(diag, vec![-1.0 / h2; m - 1])?;
    Ok(t.count_below(tol))
}

#![allow(dead_code)]

use maxforms::exterior::{Expr, FieldForm, SmoothMap, UniformGrid};
use maxforms::multiindex::binomial;
use maxforms::C64;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A random smooth scalar on `R^n`: affine part, a sine wave, a damped
/// exponential times a coordinate and a quadratic monomial.
pub fn random_scalar(n: usize, rng: &mut ChaCha8Rng) -> Expr {
    let mut u = |s: f64| rng.gen_range(-s..s);
    let mut affine = Expr::constant(u(1.0));
    let mut wave = Expr::constant(u(3.0));
    let mut growth = Expr::zero();
    for j in 1..=n {
        affine = affine + Expr::coord(j) * u(1.0);
        wave = wave + Expr::coord(j) * u(2.0);
        growth = growth + Expr::coord(j) * u(0.5);
    }
    let (a, b) = (1 + (u(1.0).abs() * n as f64) as usize % n, 1 + (u(1.0).abs() * n as f64) as usize % n);
    affine
        + wave.sin() * u(1.0)
        + growth.exp() * Expr::coord(a) * u(1.0)
        + Expr::coord(a) * Expr::coord(b) * u(1.0)
}

pub fn random_form(n: usize, q: i32, rng: &mut ChaCha8Rng) -> FieldForm {
    let comps = (0..binomial(n, q)).map(|_| random_scalar(n, rng)).collect();
    FieldForm::callable(n, q, comps).unwrap()
}

pub fn random_points(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Affine `y ↦ A y + b` with `det A ≥ 0.3`, carrying its inverse.
pub fn random_affine(n: usize, rng: &mut ChaCha8Rng) -> SmoothMap {
    loop {
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.4..0.4));
        if a.determinant() < 0.3 {
            continue;
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        return SmoothMap::affine(&a, &b).unwrap();
    }
}

/// Nonlinear map `F_j(y) = y_j + c_j y_{j+1}²` (indices cyclic) with its exact Jacobian.
pub fn random_nonlinear(n: usize, rng: &mut ChaCha8Rng) -> SmoothMap {
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let next = |j: usize| (j + 1) % n;
    let forward = (0..n).map(|j| Expr::coord(j + 1) + Expr::coord(next(j) + 1).powi(2) * c[j]).collect();
    let jacobian = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = if i == j { Expr::one() } else { Expr::zero() };
                    if next(j) == i {
                        e = e + Expr::coord(i + 1) * (2.0 * c[j]);
                    }
                    e
                })
                .collect()
        })
        .collect();
    SmoothMap::new(n, forward, jacobian).unwrap()
}

/// Grid form with dyadic values `k/8` on a lattice of spacing `1/4`: every
/// difference quotient is exact in binary floating point.
pub fn dyadic_grid_form(n: usize, q: i32, points_per_axis: usize, rng: &mut ChaCha8Rng) -> FieldForm {
    let grid = UniformGrid::new(vec![0.0; n], vec![0.25; n], vec![points_per_axis; n]).unwrap();
    let values = (0..binomial(n, q))
        .map(|_| (0..grid.len()).map(|_| C64::new(rng.gen_range(-64..=64) as f64 / 8.0, rng.gen_range(-64..=64) as f64 / 8.0)).collect())
        .collect();
    FieldForm::grid(n, q, grid, values).unwrap()
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// The root of `tan x = c x` in `(kπ, kπ + π/2)`, found as a root of
/// `sin x − c x cos x`. For `c = 1` the first positive root has `k = 1`; for
/// `c > 1` it has `k = 0`.
pub fn tan_root(c: f64, k: usize) -> f64 {
    let base = k as f64 * std::f64::consts::PI;
    bisect(|x| x.sin() - c * x * x.cos(), base + 1e-9, base + std::f64::consts::FRAC_PI_2 - 1e-9)
}

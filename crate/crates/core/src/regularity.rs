//! `H¹` classification of half-disk eigenforms by the growth of the
//! `r`-weighted Cartesian gradient norm on annuli `ε < r < 1` as `ε → 0`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::Expr;
use crate::linalg::{fit_line, LineFit};
use crate::polar::{cartesian_partials, PolarForm};
use crate::quadrature::GaussLegendre;
use crate::spectrum2d::{analytic_eigenform, FieldKind};

/// Slope at or above which a form is classified `H¹`.
pub const H1_SLOPE: f64 = -0.1;
/// Slope at or below which a form is classified not `H¹`.
pub const NOT_H1_SLOPE: f64 = -0.5;
/// Minimum coefficient of determination for a verdict on non-flat data.
pub const MIN_R_SQUARED: f64 = 0.9;

/// The `ε` sequence `0.2 · 2^{-j}`, `j = 6..=11`.
pub fn default_epsilons() -> Vec<f64> {
    (6..=11).map(|j| 0.2 * 0.5f64.powi(j)).collect()
}

/// Cartesian coefficient functions of a planar form, written in `(r, φ)`:
/// `f` for degree 0, `(f₁, f₂)` for degree 1, `f₁₂` for degree 2.
pub fn cartesian_components(form: &PolarForm) -> Vec<Expr> {
    form.cartesian_components()
}

/// `Σ_i Σ_components ∫_ε^1 ∫_0^π r |∂_i f|² dφ dr`. Radial panels are dyadic
/// towards the origin, so resolution scales with `1/ε`.
pub fn annulus_seminorm(components: &[Expr], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("annulus inner radius must lie in (0, 0.5), got {eps}")));
    }
    let partials: Vec<Expr> = components.iter().flat_map(cartesian_partials).collect();
    let gl = GaussLegendre::new(20);
    let mut edges = vec![eps];
    while *edges.last().expect("nonempty") < 0.5 {
        let next = 2.0 * edges.last().expect("nonempty");
        edges.push(next.min(1.0));
    }
    if *edges.last().expect("nonempty") < 1.0 {
        edges.push(1.0);
    }
    let total = edges
        .windows(2)
        .map(|w| {
            gl.integrate(w[0], w[1], 1, |rr| {
                gl.integrate(0.0, PI, 8, |p| partials.iter().map(|d| d.eval(&[rr, p]).norm_sqr()).sum::<f64>() * rr)
            })
        })
        .sum();
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    H1,
    NotH1,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub q: i32,
    pub n: usize,
    pub m: usize,
    pub field: FieldKind,
    pub epsilons: Vec<f64>,
    pub seminorms: Vec<f64>,
    pub fit: LineFit,
    /// Whether `log s` varies by less than a tenth of the `log ε` range.
    pub flat: bool,
    pub verdict: Verdict,
}

/// Fits `log s(ε)` against `log ε` and applies the slope thresholds. A
/// verdict needs `R² ≥ 0.9` unless the data is flat; the band between the
/// thresholds is indeterminate.
pub fn verdict_from_samples(epsilons: &[f64], seminorms: &[f64]) -> Result<(LineFit, bool, Verdict)> {
    if epsilons.len() < 4 || epsilons.len() != seminorms.len() {
        return Err(Error::InvalidArgument("need at least four matching samples".into()));
    }
    if seminorms.iter().all(|&s| s == 0.0) {
        let fit = LineFit { slope: 0.0, intercept: f64::NEG_INFINITY, r_squared: 1.0 };
        return Ok((fit, true, Verdict::H1));
    }
    if seminorms.iter().any(|&s| !s.is_finite() || s <= 0.0) {
        return Err(Error::InvalidArgument("seminorm samples must be positive and finite".into()));
    }
    let x: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = seminorms.iter().map(|s| s.ln()).collect();
    let fit = fit_line(&x, &y);
    let range = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    let flat = range(&y) <= 0.1 * range(&x);
    let verdict = if !flat && fit.r_squared < MIN_R_SQUARED {
        Verdict::Indeterminate
    } else if fit.slope >= H1_SLOPE {
        Verdict::H1
    } else if fit.slope <= NOT_H1_SLOPE {
        Verdict::NotH1
    } else {
        Verdict::Indeterminate
    };
    Ok((fit, flat, verdict))
}

/// Classifies one field of a closed-form half-disk eigenpair.
pub fn classify(q: i32, n: usize, m: usize, field: FieldKind) -> Result<RegularityReport> {
    classify_with(q, n, m, field, &default_epsilons(), 1.0)
}

/// As [`classify`], with explicit `ε` values and a scale factor applied to the form.
pub fn classify_with(q: i32, n: usize, m: usize, field: FieldKind, epsilons: &[f64], scale: f64) -> Result<RegularityReport> {
    let pair = analytic_eigenform(q, n, m)?;
    let comps: Vec<Expr> = cartesian_components(pair.field(field)).iter().map(|c| c.scale(scale)).collect();
    let seminorms = epsilons.par_iter().map(|&e| annulus_seminorm(&comps, e)).collect::<Result<Vec<_>>>()?;
    let (fit, flat, verdict) = verdict_from_samples(epsilons, &seminorms)?;
    Ok(RegularityReport { q, n, m, field, epsilons: epsilons.to_vec(), seminorms, fit, flat, verdict })
}

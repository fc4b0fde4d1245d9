//! Radial/tangential splitting of forms on punctured space and cones.
//!
//! Pointwise operators work in any dimension on [`FormValue`]s:
//! `X = Σ x_n dx^n`, `R̂E = X ∧ E`, `T̂E = σ_q *(X ∧ *E)` and `m = |x|`. The
//! splitting `E = dr ∧ E^ρ + E^τ` uses `E^ρ = m⁻¹T̂E`, `E^τ = m⁻²T̂R̂E`.
//! The sphere-factor relations between `rot`/`div` and `Rot`/`Div` are
//! realized for `N = 2` through [`PolarForm`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::FormValue;
use crate::multiindex::sigma;
use crate::polar::{polar_value, CircleForm, PolarForm};
use crate::C64;

/// `X ∧ E`.
pub fn r_hat(e: &FormValue, x: &[f64]) -> FormValue {
    FormValue::one_form(x).wedge(e)
}

/// `σ_q *(X ∧ *E)` for `E` of degree `q`.
pub fn t_hat(e: &FormValue, x: &[f64]) -> FormValue {
    FormValue::one_form(x).wedge(&e.hodge()).hodge().scale(sigma(e.degree, e.dim) as f64)
}

fn modulus(x: &[f64]) -> Result<f64> {
    let m = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if m == 0.0 {
        return Err(Error::Origin);
    }
    Ok(m)
}

/// `R̂E`, `T̂E` and `mE` at the point `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialOperators {
    pub r_hat: FormValue,
    pub t_hat: FormValue,
    pub m: FormValue,
}

pub fn radial_operators(e: &FormValue, x: &[f64]) -> Result<RadialOperators> {
    if x.len() != e.dim {
        return Err(Error::DimensionMismatch { expected: e.dim, found: x.len() });
    }
    let m = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(RadialOperators { r_hat: r_hat(e, x), t_hat: t_hat(e, x), m: e.scale(m) })
}

/// Normal and tangential parts at one point: `E = dr ∧ E^ρ + E^τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitValue {
    pub rho: FormValue,
    pub tau: FormValue,
}

pub fn split(e: &FormValue, x: &[f64]) -> Result<SplitValue> {
    let m = modulus(x)?;
    if x.len() != e.dim {
        return Err(Error::DimensionMismatch { expected: e.dim, found: x.len() });
    }
    let rho = t_hat(e, x).scale(1.0 / m);
    let tau = t_hat(&r_hat(e, x), x).scale(1.0 / (m * m));
    Ok(SplitValue { rho, tau })
}

/// `ρ̌F = dr ∧ F`.
pub fn rho_check(f: &FormValue, x: &[f64]) -> Result<FormValue> {
    let m = modulus(x)?;
    Ok(r_hat(f, x).scale(1.0 / m))
}

/// `τ̌F = F` for tangential `F`.
pub fn tau_check(f: &FormValue) -> FormValue {
    f.clone()
}

/// Reassembles `dr ∧ E^ρ + E^τ`.
pub fn reassemble(s: &SplitValue, x: &[f64]) -> Result<FormValue> {
    Ok(rho_check(&s.rho, x)?.add(&s.tau))
}

/// Pointwise inner product `Σ_I a_I conj(b_I)`.
pub fn pointwise_inner(a: &FormValue, b: &FormValue) -> C64 {
    a.coeffs.iter().zip(&b.coeffs).map(|(u, v)| u * v.conj()).sum()
}

/// Samples of a function of `r` on the offset grid `r_i = (i − 1/2) h`, `i = 1..=M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub h: f64,
    pub values: Vec<C64>,
}

impl RadialProfile {
    /// Samples `f` on `M` cells of `(0, radius)`.
    pub fn sample(radius: f64, cells: usize, f: impl Fn(f64) -> C64) -> Self {
        let h = radius / cells as f64;
        Self { h, values: (1..=cells).map(|i| f((i as f64 - 0.5) * h)).collect() }
    }

    pub fn zeros(radius: f64, cells: usize) -> Self {
        Self::sample(radius, cells, |_| C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.h * self.len() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && (self.h - other.h).abs() <= 1e-15 * self.h
    }

    /// `∫₀^R r^{N−1}|u|² dr` by the midpoint rule.
    pub fn weighted_norm_sqr(&self, n: usize) -> f64 {
        weighted_inner(self, self, n).expect("same grid").re
    }
}

/// `∫₀^R r^{N−1} u conj(v) dr` by the midpoint rule on the offset grid.
pub fn weighted_inner(u: &RadialProfile, v: &RadialProfile, n: usize) -> Result<C64> {
    weighted_inner_exp(u, v, n as f64 - 1.0)
}

fn weighted_inner_exp(u: &RadialProfile, v: &RadialProfile, exponent: f64) -> Result<C64> {
    if !u.same_grid(v) {
        return Err(Error::IncompatibleDomains("radial profiles live on different grids".into()));
    }
    Ok((0..u.len()).map(|i| u.values[i] * v.values[i].conj() * u.node(i).powf(exponent) * u.h).sum())
}

/// A family `(u_n)` in the weighted sequence space with norm
/// `(Σ_n ∫₀^R r^ρ |u_n|² dr)^{1/2}`.
#[derive(Clone, Debug, Serialize)]
pub struct SequenceSpaceElement {
    pub weight: f64,
    pub profiles: Vec<RadialProfile>,
}

impl SequenceSpaceElement {
    pub fn norm(&self) -> f64 {
        self.profiles
            .iter()
            .map(|u| weighted_inner_exp(u, u, self.weight).expect("same grid").re)
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.profiles.len() != other.profiles.len() {
            return Err(Error::DimensionMismatch { expected: self.profiles.len(), found: other.profiles.len() });
        }
        self.profiles.iter().zip(&other.profiles).map(|(u, v)| weighted_inner_exp(u, v, self.weight)).sum()
    }
}

/// The four residuals, in the order
/// `ρ div`, `τ div`, `ρ rot`, `τ rot`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelationResiduals(pub [f64; 4]);

impl RelationResiduals {
    pub const NAMES: [&'static str; 4] = ["rho_div", "tau_div", "rho_rot", "tau_rot"];
}

/// Coefficient of a circle form at `(r, φ)`, zero for absent degrees.
fn circle_at(f: &CircleForm, r: f64, phi: f64) -> C64 {
    f.coeff_or_zero().eval(&[r, phi])
}

/// `r^{-k} ∂_r (r^k g)` by centered differences with step `h`.
fn weighted_radial_fd(g: &CircleForm, k: i32, r: f64, phi: f64, h: f64) -> C64 {
    let up = circle_at(g, r + h, phi) * (r + h).powi(k);
    let down = circle_at(g, r - h, phi) * (r - h).powi(k);
    (up - down) / (2.0 * h) / r.powi(k)
}

/// `∂_φ` of a circle form coefficient by centered differences, carried to the
/// degree `Rot`/`Div` produce (zero when that degree is absent).
fn angular_fd(g: &CircleForm, raise: bool, r: f64, phi: f64, h: f64) -> C64 {
    let active = if raise { g.degree == 0 } else { g.degree == 1 };
    if !active {
        return C64::new(0.0, 0.0);
    }
    (circle_at(g, r, phi + h) - circle_at(g, r, phi - h)) / (2.0 * h)
}

fn polar_parts(values: &[C64], degree: i32) -> (C64, C64) {
    let zero = C64::new(0.0, 0.0);
    match degree {
        0 => (zero, values[0]),
        1 => (values[0], values[1]),
        2 => (values[0], zero),
        _ => (zero, zero),
    }
}

/// Residuals of the four sphere relations for a planar form at sample points
/// `(r, φ)`. The left sides apply the Cartesian `d` and `δ` (analytic
/// partials); the right sides use centered differences of step `h` in `r`
/// and `φ`, so each residual is `O(h²)`. Returns the maximum over samples.
pub fn sphere_relation_residuals(form: &PolarForm, samples: &[(f64, f64)], h: f64) -> Result<RelationResiduals> {
    const N: i32 = 2;
    let q = form.degree();
    let cart = form.to_cartesian();
    let (rot, div) = (cart.ext_d(), cart.codiff());
    let (rho, tau) = (form.rho(), form.tau());
    let mut worst = [0.0f64; 4];
    for &(r, phi) in samples {
        if r <= h {
            return Err(Error::Origin);
        }
        let x = [r * phi.cos(), r * phi.sin()];
        let (rho_div, tau_div) = if (0..=2).contains(&div.degree()) {
            polar_parts(&polar_value(&div.eval(&x)?, phi), div.degree())
        } else {
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        };
        let (rho_rot, tau_rot) = if (0..=2).contains(&rot.degree()) {
            polar_parts(&polar_value(&rot.eval(&x)?, phi), rot.degree())
        } else {
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        };
        let div_rho = angular_fd(&rho, false, r, phi, h);
        let div_tau = angular_fd(&tau, false, r, phi, h);
        let rot_rho = angular_fd(&rho, true, r, phi, h);
        let rot_tau = angular_fd(&tau, true, r, phi, h);
        let res = [
            rho_div - (-div_rho / r),
            tau_div - (weighted_radial_fd(&rho, N - q, r, phi, h) + div_tau / r),
            rho_rot - (-rot_rho / r + weighted_radial_fd(&tau, q, r, phi, h)),
            tau_rot - rot_tau / r,
        ];
        for (w, v) in worst.iter_mut().zip(res) {
            *w = w.max(v.norm());
        }
    }
    Ok(RelationResiduals(worst))
}

/// Observed convergence orders of the four residuals when `h` is halved
/// `levels` times, from a least-squares fit of `log residual` against
/// `log h`. `None` where the residual vanishes to roundoff at every level.
pub fn relation_orders(form: &PolarForm, samples: &[(f64, f64)], h0: f64, levels: usize) -> Result<[Option<f64>; 4]> {
    let mut logs_h = Vec::new();
    let mut logs_r = vec![Vec::new(); 4];
    let mut h = h0;
    for _ in 0..=levels {
        let res = sphere_relation_residuals(form, samples, h)?;
        logs_h.push(h.ln());
        for (log, v) in logs_r.iter_mut().zip(res.0) {
            log.push(v);
        }
        h *= 0.5;
    }
    Ok(std::array::from_fn(|k| {
        if logs_r[k].iter().any(|&v| v <= 1e-13) {
            return None;
        }
        let y: Vec<f64> = logs_r[k].iter().map(|v| v.ln()).collect();
        Some(crate::linalg::fit_line(&logs_h, &y).slope)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Expr;
    use crate::polar::{phi, r};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn t_hat_example() {
        let dx1 = FormValue::one_form(&[1.0, 0.0]);
        let t = t_hat(&dx1, &[0.0, 1.0]);
        assert_eq!(t.coeffs, vec![c(0.0)]);
        let t = t_hat(&dx1, &[0.7, 1.0]);
        assert_eq!(t.coeffs, vec![c(0.7)]);
    }

    #[test]
    fn anticommutator_is_m_squared() {
        let e = FormValue::new(2, 1, vec![c(0.3), C64::new(-1.2, 0.5)]);
        let x = [3.0, 4.0];
        let lhs = r_hat(&t_hat(&e, &x), &x).add(&t_hat(&r_hat(&e, &x), &x));
        assert!(lhs.sub(&e.scale(25.0)).max_abs() < 1e-12);
    }

    #[test]
    fn t_hat_of_zero_form_vanishes() {
        let e = FormValue::new(3, 0, vec![c(2.0)]);
        let t = t_hat(&e, &[1.0, 2.0, 3.0]);
        assert_eq!(t.degree, -1);
        assert!(t.coeffs.is_empty());
    }

    #[test]
    fn split_of_dr() {
        let x = [0.6, 0.8];
        let dr = FormValue::one_form(&x);
        let s = split(&dr, &x).unwrap();
        assert!((s.rho.coeffs[0] - c(1.0)).norm() < 1e-15);
        assert!(s.tau.max_abs() < 1e-15);
        let dphi = FormValue::one_form(&[-0.8, 0.6]);
        assert!(split(&dphi, &x).unwrap().rho.max_abs() < 1e-15);
        assert!(matches!(split(&dr, &[0.0, 0.0]), Err(Error::Origin)));
    }

    #[test]
    fn weighted_inner_examples() {
        let one = RadialProfile::sample(1.0, 100, |_| c(1.0));
        let lin = RadialProfile::sample(1.0, 100, c);
        assert!((weighted_inner(&one, &one, 2).unwrap().re - 0.5).abs() < 1e-14);
        let v = weighted_inner(&lin, &one, 2).unwrap().re;
        assert!((v - 1.0 / 3.0).abs() < 1e-4);
        let other = RadialProfile::sample(1.0, 50, |_| c(1.0));
        assert!(weighted_inner(&one, &other, 2).is_err());
    }

    #[test]
    fn constant_form_has_zero_residuals() {
        let f = PolarForm::scalar(Expr::constant(3.0));
        let res = sphere_relation_residuals(&f, &[(0.5, 1.0), (0.8, 2.0)], 1e-2).unwrap();
        assert_eq!(res.0, [0.0; 4]);
    }

    #[test]
    fn tau_rot_relation_second_order() {
        let f = PolarForm::scalar(r().powi(2) * phi().cos());
        let orders = relation_orders(&f, &[(0.5, 0.4), (0.9, 2.1)], 0.05, 2).unwrap();
        let o = orders[3].expect("nontrivial residual");
        assert!((o - 2.0).abs() < 0.3, "order {o}");
    }
}

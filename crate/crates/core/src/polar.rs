//! Forms on the punctured plane written in polar coordinates.
//!
//! Coefficients are [`Expr`]s over the polar variables `(r, φ)` (coordinates
//! 1 and 2 of the expression) relative to the orthonormal frame `dr, r dφ`:
//! a 0-form is `[f]`, a 1-form `[f_r, f_φ]` means `f_r dr + f_φ r dφ`, and a
//! 2-form `[h]` means `h dr ∧ r dφ = h dx¹ ∧ dx²`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::bessel::j_half;
use crate::exterior::{Expr, FieldForm, FormValue, Leaf};
use crate::multiindex::sigma;
use crate::C64;

/// The radial variable `r`.
pub fn r() -> Expr {
    Expr::coord(1)
}

/// The angular variable `φ`.
pub fn phi() -> Expr {
    Expr::coord(2)
}

struct BesselLeaf {
    n: usize,
}

impl Leaf for BesselLeaf {
    fn arity(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> C64 {
        if x[0] > 0.0 {
            C64::new(j_half(self.n, x[0]), 0.0)
        } else {
            C64::new(f64::NAN, 0.0)
        }
    }

    fn partial(&self, _j: usize) -> Expr {
        let x = Expr::coord(1);
        let nu = self.n as f64 - 0.5;
        x.powi(-1) * nu * bessel_j(self.n, x.clone()) - bessel_j(self.n + 1, x)
    }

    fn name(&self) -> String {
        format!("J[{}-1/2]", self.n)
    }
}

/// `J_{n-1/2}(arg)` with exact derivatives from `J_ν′ = (ν/x) J_ν − J_{ν+1}`.
pub fn bessel_j(n: usize, arg: Expr) -> Expr {
    Expr::leaf(Arc::new(BesselLeaf { n })).substitute(&[arg])
}

struct Atan2Leaf;

impl Leaf for Atan2Leaf {
    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> C64 {
        let a = x[1].atan2(x[0]);
        C64::new(if a < -FRAC_PI_2 { a + 2.0 * PI } else { a }, 0.0)
    }

    fn partial(&self, j: usize) -> Expr {
        let (x1, x2) = (Expr::coord(1), Expr::coord(2));
        let inv = (x1.powi(2) + x2.powi(2)).powi(-1);
        if j == 0 {
            -(x2 * inv)
        } else {
            x1 * inv
        }
    }

    fn name(&self) -> String {
        "atan2".into()
    }
}

/// `(r(x), φ(x))` as Cartesian expressions with `φ ∈ [−π/2, 3π/2)`, so the
/// branch cut stays away from the closed upper half plane.
pub fn polar_of_cartesian() -> [Expr; 2] {
    let (x1, x2) = (Expr::coord(1), Expr::coord(2));
    [(x1.powi(2) + x2.powi(2)).sqrt(), Expr::leaf(Arc::new(Atan2Leaf))]
}

/// Cartesian partials `(∂₁f, ∂₂f)` of a polar expression, written in `(r, φ)`.
pub fn cartesian_partials(f: &Expr) -> [Expr; 2] {
    let (fr, fp) = (f.partial(1), f.partial(2));
    let (c, s, inv) = (phi().cos(), phi().sin(), r().powi(-1));
    [
        c.clone() * fr.clone() - s.clone() * inv.clone() * fp.clone(),
        s * fr + c * inv * fp,
    ]
}

/// A form of degree 0, 1 or 2 on a planar domain in polar coordinates.
#[derive(Clone, Debug)]
pub struct PolarForm {
    degree: i32,
    comps: Vec<Expr>,
}

/// A form on the unit circle, as a function of `r`: degree 0 is a scalar,
/// degree 1 the coefficient of `dφ`. Other degrees are the zero form.
#[derive(Clone, Debug)]
pub struct CircleForm {
    pub degree: i32,
    pub coeff: Expr,
}

impl CircleForm {
    pub fn zero(degree: i32) -> Self {
        Self { degree, coeff: Expr::zero() }
    }

    fn exists(&self) -> bool {
        (0..=1).contains(&self.degree)
    }

    /// Circle rotation: `Rot g = g′ dφ` on 0-forms, zero on 1-forms.
    pub fn rot(&self) -> Self {
        match self.degree {
            0 => Self { degree: 1, coeff: self.coeff.partial(2) },
            d => Self::zero(d + 1),
        }
    }

    /// Circle divergence `σ₁ * d *`: `Div(g dφ) = g′` on 1-forms, zero on 0-forms.
    pub fn div(&self) -> Self {
        match self.degree {
            1 => Self { degree: 0, coeff: self.coeff.partial(2).scale(sigma(1, 1) as f64) },
            d => Self::zero(d - 1),
        }
    }

    pub fn coeff_or_zero(&self) -> Expr {
        if self.exists() {
            self.coeff.clone()
        } else {
            Expr::zero()
        }
    }
}

impl PolarForm {
    pub fn scalar(f: Expr) -> Self {
        Self { degree: 0, comps: vec![f] }
    }

    pub fn one_form(f_r: Expr, f_phi: Expr) -> Self {
        Self { degree: 1, comps: vec![f_r, f_phi] }
    }

    pub fn two_form(h: Expr) -> Self {
        Self { degree: 2, comps: vec![h] }
    }

    pub fn zero(degree: i32) -> Self {
        let len = match degree {
            0 | 2 => 1,
            1 => 2,
            _ => 0,
        };
        Self { degree, comps: vec![Expr::zero(); len] }
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn eval(&self, r: f64, phi: f64) -> Vec<C64> {
        self.comps.iter().map(|e| e.eval(&[r, phi])).collect()
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        let s = s.into();
        Self { degree: self.degree, comps: self.comps.iter().map(|e| e.scale(s)).collect() }
    }

    /// Exterior derivative in polar form.
    pub fn rot(&self) -> Self {
        let inv = r().powi(-1);
        match self.degree {
            0 => {
                let f = &self.comps[0];
                Self::one_form(f.partial(1), inv * f.partial(2))
            }
            1 => {
                let (fr, fp) = (&self.comps[0], &self.comps[1]);
                Self::two_form(inv * ((r() * fp.clone()).partial(1) - fr.partial(2)))
            }
            d => Self::zero(d + 1),
        }
    }

    /// Coderivative `σ_q * d *` in polar form.
    pub fn div(&self) -> Self {
        let inv = r().powi(-1);
        match self.degree {
            1 => {
                let (fr, fp) = (&self.comps[0], &self.comps[1]);
                Self::scalar(inv.clone() * (r() * fr.clone()).partial(1) + inv * fp.partial(2))
            }
            2 => {
                let h = &self.comps[0];
                Self::one_form(-(inv * h.partial(2)), h.partial(1))
            }
            d => Self::zero(d - 1),
        }
    }

    /// Normal part `ρ`, a circle form of degree `q − 1`.
    pub fn rho(&self) -> CircleForm {
        match self.degree {
            1 | 2 => CircleForm { degree: self.degree - 1, coeff: self.comps[0].clone() },
            d => CircleForm::zero(d - 1),
        }
    }

    /// Tangential part `τ`, a circle form of degree `q`.
    pub fn tau(&self) -> CircleForm {
        match self.degree {
            0 => CircleForm { degree: 0, coeff: self.comps[0].clone() },
            1 => CircleForm { degree: 1, coeff: self.comps[1].clone() },
            d => CircleForm::zero(d),
        }
    }

    /// `ρ̌ a + τ̌ b` for circle forms `a` of degree `q − 1` and `b` of degree `q`.
    pub fn from_parts(degree: i32, rho: &Expr, tau: &Expr) -> Self {
        match degree {
            0 => Self::scalar(tau.clone()),
            1 => Self::one_form(rho.clone(), tau.clone()),
            2 => Self::two_form(rho.clone()),
            d => Self::zero(d),
        }
    }

    /// Cartesian coefficients in `(r, φ)`: `f`, `(f₁, f₂)` or `f₁₂`.
    pub fn cartesian_components(&self) -> Vec<Expr> {
        match self.degree {
            1 => {
                let (fr, fp) = (self.comps[0].clone(), self.comps[1].clone());
                let (c, s) = (phi().cos(), phi().sin());
                vec![
                    fr.clone() * c.clone() - fp.clone() * s.clone(),
                    fr * s + fp * c,
                ]
            }
            _ => self.comps.clone(),
        }
    }

    /// The same form as a Cartesian [`FieldForm`] on `R²`.
    pub fn to_cartesian(&self) -> FieldForm {
        let sub = polar_of_cartesian();
        let comps = self.cartesian_components().iter().map(|e| e.substitute(&sub)).collect();
        FieldForm::callable(2, self.degree, comps).expect("component count matches degree")
    }
}

/// Converts a Cartesian value at angle `φ` to the orthonormal polar frame.
pub fn polar_value(v: &FormValue, phi: f64) -> Vec<C64> {
    match v.degree {
        1 => {
            let (c, s) = (phi.cos(), phi.sin());
            vec![v.coeffs[0] * c + v.coeffs[1] * s, -v.coeffs[0] * s + v.coeffs[1] * c]
        }
        _ => v.coeffs.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_leaf_derivatives() {
        let f = bessel_j(1, r() * 2.0);
        let x = 0.7;
        let d = f.partial(1).eval(&[x, 0.0]).re;
        let h = 1e-5;
        let fd = (j_half(1, 2.0 * (x + h)) - j_half(1, 2.0 * (x - h))) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8);
        // Second derivative through the chain of leaves.
        let dd = f.partial(1).partial(1).eval(&[x, 0.0]).re;
        let fdd = (j_half(1, 2.0 * (x + h)) - 2.0 * j_half(1, 2.0 * x) + j_half(1, 2.0 * (x - h))) / (h * h);
        assert!((dd - fdd).abs() < 1e-4);
    }

    #[test]
    fn radial_unit_field() {
        let f = PolarForm::one_form(Expr::one(), Expr::zero());
        let c = f.cartesian_components();
        let p = [0.5, 0.3];
        assert!((c[0].eval(&p).re - 0.3f64.cos()).abs() < 1e-15);
        assert!((c[1].eval(&p).re - 0.3f64.sin()).abs() < 1e-15);
        let g = PolarForm::one_form(Expr::zero(), Expr::one());
        assert!((g.cartesian_components()[0].eval(&p).re + 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn polar_rot_div_match_cartesian() {
        let p = [0.6f64, 1.1];
        let x = [p[0] * p[1].cos(), p[0] * p[1].sin()];
        let forms = [
            PolarForm::scalar(r().powi(2) * phi().cos() + phi().sin() * r()),
            PolarForm::one_form(r().powi(3) * (phi() * 0.5).cos(), r() * (phi() * 1.5).sin()),
            PolarForm::two_form(r().exp() * (phi() * 2.0).cos()),
        ];
        for f in &forms {
            let cart = f.to_cartesian();
            for (polar, cart) in [(f.rot(), cart.ext_d()), (f.div(), cart.codiff())] {
                if polar.degree() < 0 || polar.degree() > 2 {
                    continue;
                }
                let a = polar.eval(p[0], p[1]);
                let b = polar_value(&cart.eval(&x).unwrap(), p[1]);
                for (u, v) in a.iter().zip(&b) {
                    assert!((u - v).norm() < 1e-12, "degree {}: {u} vs {v}", f.degree());
                }
            }
        }
    }
}

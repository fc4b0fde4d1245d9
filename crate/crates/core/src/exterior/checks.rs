//! Fixed identity suite: sign-constant relations and the basic laws of
//! `*`, `d` and `δ` on deterministic smooth forms.

use serde::Serialize;

use super::{Expr, FieldForm};
use crate::error::Result;
use crate::multiindex::{binomial, enumerate_ordered, kappa, sign_identity_residuals};

#[derive(Clone, Debug, Serialize)]
pub struct SignResidual {
    pub q: i32,
    pub identity: &'static str,
    pub residual: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalculusResidual {
    pub q: i32,
    pub identity: &'static str,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub dim: usize,
    pub signs: Vec<SignResidual>,
    pub calculus: Vec<CalculusResidual>,
}

impl IdentityReport {
    pub fn max_sign_residual(&self) -> i32 {
        self.signs.iter().map(|s| s.residual.abs()).max().unwrap_or(0)
    }

    pub fn max_calculus_residual(&self) -> f64 {
        self.calculus.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// A smooth degree-`q` form on `R^n` whose components all depend on every coordinate.
pub fn sample_form(n: usize, q: i32, seed: usize) -> FieldForm {
    let len = binomial(n, q);
    let comps = (0..len)
        .map(|k| {
            let mut arg = Expr::constant(0.1 * (k + seed) as f64);
            let mut poly = Expr::one();
            for j in 1..=n {
                let x = Expr::coord(j);
                arg = arg + x.clone() * (0.3 + 0.17 * ((j + 2 * k + seed) % 5) as f64);
                poly = poly * (x * (0.2 + 0.1 * ((j + k) % 3) as f64) + 1.0);
            }
            arg.sin() + poly
        })
        .collect();
    FieldForm::callable(n, q, comps).expect("component count is binomial(n, q)")
}

fn sample_points(n: usize) -> Vec<Vec<f64>> {
    (0..4).map(|p| (0..n).map(|j| 0.1 + 0.23 * ((p * 3 + j * 5) % 7) as f64).collect()).collect()
}

/// Residuals of the sign identities for `q = 0..=n` and of `** = κ`,
/// `d∘d = 0`, `σ * d * = δ` and the Leibniz rule in dimension `n`.
pub fn identity_report(n: usize) -> Result<IdentityReport> {
    let mut signs = Vec::new();
    for q in 0..=n as i32 {
        for (identity, residual) in sign_identity_residuals(q, n) {
            signs.push(SignResidual { q, identity, residual });
        }
    }
    let points = sample_points(n);
    let mut calculus = Vec::new();
    for q in 0..=n as i32 {
        let mut hh = 0.0f64;
        for index in enumerate_ordered(q, n) {
            let e = FieldForm::basis(n, &index)?;
            let diff = e.hodge().hodge().sub(&e.scale(kappa(q, n) as f64))?;
            hh = hh.max(diff.max_abs(&points)?);
        }
        calculus.push(CalculusResidual { q, identity: "** = kappa_q", residual: hh });
        let phi = sample_form(n, q, 1);
        calculus.push(CalculusResidual { q, identity: "d d = 0", residual: phi.ext_d().ext_d().max_abs(&points)? });
        calculus.push(CalculusResidual {
            q,
            identity: "sigma_q * d * = local coderivative",
            residual: phi.codiff().sub(&phi.codiff_local())?.max_abs(&points)?,
        });
        if q < n as i32 {
            let psi = sample_form(n, 1, 2);
            let lhs = phi.wedge(&psi)?.ext_d();
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = phi.ext_d().wedge(&psi)?.add(&phi.wedge(&psi.ext_d())?.scale(sign))?;
            let scale = lhs.max_abs(&points)?.max(1.0);
            calculus.push(CalculusResidual { q, identity: "Leibniz rule", residual: lhs.sub(&rhs)?.max_abs(&points)? / scale });
        }
    }
    Ok(IdentityReport { dim: n, signs, calculus })
}

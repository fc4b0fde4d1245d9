use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior::algebra::Coeff;
use crate::exterior::expr::Expr;
use crate::exterior::form::{FieldForm, Repr};
use crate::multiindex::{enumerate_ordered, kappa};

/// A smooth map `τ: R^n → R^m` with explicit Jacobian `jacobian[i][j] = ∂_i F_j`
/// (row = source coordinate, column = target component).
#[derive(Clone, Debug)]
pub struct SmoothMap {
    forward: Vec<Expr>,
    jacobian: Vec<Vec<Expr>>,
    source_dim: usize,
    inverse: Option<Arc<SmoothMap>>,
}

impl SmoothMap {
    pub fn new(source_dim: usize, forward: Vec<Expr>, jacobian: Vec<Vec<Expr>>) -> Result<Self> {
        if jacobian.len() != source_dim {
            return Err(Error::DimensionMismatch { expected: source_dim, found: jacobian.len() });
        }
        if let Some(row) = jacobian.iter().find(|r| r.len() != forward.len()) {
            return Err(Error::DimensionMismatch { expected: forward.len(), found: row.len() });
        }
        Ok(Self { forward, jacobian, source_dim, inverse: None })
    }

    /// Attaches the inverse map, needed by the ε/μ transformations.
    pub fn with_inverse(mut self, inverse: SmoothMap) -> Result<Self> {
        if inverse.source_dim != self.target_dim() || inverse.target_dim() != self.source_dim {
            return Err(Error::DimensionMismatch { expected: self.target_dim(), found: inverse.source_dim });
        }
        self.inverse = Some(Arc::new(inverse));
        Ok(self)
    }

    /// `y ↦ A y + b`, with its inverse when `A` is invertible.
    pub fn affine(a: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        let map = Self::affine_only(a, b)?;
        match a.clone().try_inverse() {
            Some(inv) => {
                let shift = -(&inv * DVector::from_column_slice(b));
                let back = Self::affine_only(&inv, shift.as_slice())?;
                map.with_inverse(back)
            }
            None => Ok(map),
        }
    }

    fn affine_only(a: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: b.len() });
        }
        let forward = (0..m)
            .map(|j| (0..n).fold(Expr::constant(b[j]), |acc, i| acc + Expr::coord(i + 1) * a[(j, i)]))
            .collect();
        let jacobian = (0..n).map(|i| (0..m).map(|j| Expr::constant(a[(j, i)])).collect()).collect();
        Self::new(n, forward, jacobian)
    }

    pub fn identity(n: usize) -> Self {
        Self::affine(&DMatrix::identity(n, n), &vec![0.0; n]).expect("identity is affine")
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> Option<&SmoothMap> {
        self.inverse.as_deref()
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.forward.iter().map(|f| f.eval(y).re).collect()
    }

    /// Jacobian at `y` as a matrix with entries `∂_i F_j` at `(i, j)`.
    pub fn jacobian_at(&self, y: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.source_dim, self.target_dim(), |i, j| self.jacobian[i][j].eval(y).re)
    }

    /// Largest deviation between the supplied Jacobian and centered differences
    /// of the forward map with step `h`.
    pub fn verify_jacobian(&self, points: &[Vec<f64>], h: f64) -> f64 {
        let mut worst = 0.0f64;
        for y in points {
            let jac = self.jacobian_at(y);
            for i in 0..self.source_dim {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += h;
                ym[i] -= h;
                let fp = self.apply(&yp);
                let fm = self.apply(&ym);
                for j in 0..self.target_dim() {
                    worst = worst.max(((fp[j] - fm[j]) / (2.0 * h) - jac[(i, j)]).abs());
                }
            }
        }
        worst
    }

    /// Common sign of the Jacobian determinant over `points`.
    pub fn orientation(&self, points: &[Vec<f64>]) -> Result<i32> {
        if self.source_dim != self.target_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim, found: self.target_dim() });
        }
        let mut sign = 0;
        for y in points {
            let det = self.jacobian_at(y).determinant();
            if !det.is_finite() || det.abs() < 1e-300 {
                return Err(Error::SingularJacobian { point: y.clone(), det });
            }
            let s = if det > 0.0 { 1 } else { -1 };
            if sign != 0 && s != sign {
                return Err(Error::InvalidArgument("Jacobian determinant changes sign".into()));
            }
            sign = s;
        }
        Ok(sign)
    }

    /// Pullback `τ*Φ`: `(τ*Φ)_I = Σ_J Φ_J(τ(y)) · det[∂_{I_a} F_{J_b}]` over ordered `J`.
    pub fn pullback(&self, phi: &FieldForm) -> Result<FieldForm> {
        if phi.dim() != self.target_dim() {
            return Err(Error::DimensionMismatch { expected: self.target_dim(), found: phi.dim() });
        }
        let comps = match phi.repr() {
            Repr::Callable(c) => c,
            Repr::Grid(_) => return Err(Error::IncompatibleDomains("pullback of a grid form".into())),
        };
        let q = phi.degree();
        let composed: Vec<Expr> = comps.iter().map(|e| e.substitute(&self.forward)).collect();
        let targets = enumerate_ordered(q, self.target_dim());
        let out = enumerate_ordered(q, self.source_dim)
            .iter()
            .map(|i| {
                targets.iter().zip(&composed).fold(Expr::zero(), |acc, (j, c)| {
                    if c.is_zero() {
                        return acc;
                    }
                    let minor: Vec<Vec<Expr>> = i
                        .indices()
                        .iter()
                        .map(|&a| j.indices().iter().map(|&b| self.jacobian[a - 1][b - 1].clone()).collect())
                        .collect();
                    acc + c.clone() * leibniz_det(&minor)
                })
            })
            .collect();
        FieldForm::callable(self.source_dim, q, out)
    }

    fn require_inverse(&self, samples: &[Vec<f64>]) -> Result<&SmoothMap> {
        let inv = self
            .inverse
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("transformation requires the inverse map".into()))?;
        if self.orientation(samples)? < 0 {
            return Err(Error::InvalidArgument("orientation-reversing maps are not supported".into()));
        }
        Ok(inv)
    }

    /// `ε_τ Φ = κ_q * τ* * (τ⁻¹)* Φ`; the sample points certify that the
    /// Jacobian is invertible with positive determinant.
    pub fn transform_eps(&self, phi: &FieldForm, samples: &[Vec<f64>]) -> Result<FieldForm> {
        let inv = self.require_inverse(samples)?;
        let k = kappa(phi.degree(), phi.dim()) as f64;
        Ok(self.pullback(&inv.pullback(phi)?.hodge())?.hodge().scale(k))
    }

    /// `μ_τ Φ = κ_q τ* * (τ⁻¹)* * Φ`.
    pub fn transform_mu(&self, phi: &FieldForm, samples: &[Vec<f64>]) -> Result<FieldForm> {
        let inv = self.require_inverse(samples)?;
        let k = kappa(phi.degree(), phi.dim()) as f64;
        Ok(self.pullback(&inv.pullback(&phi.hodge())?.hodge())?.scale(k))
    }
}

/// Determinant by permutation expansion; sizes here never exceed the dimension.
fn leibniz_det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 0 {
        return Expr::one();
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = Expr::zero();
    permute(&mut perm, 0, &mut |p| {
        let sign = crate::multiindex::perm_sign_of(&p.iter().map(|&x| x + 1).collect::<Vec<_>>()).expect("permutation");
        let term = (0..n).fold(Expr::one(), |t, r| t * m[r][p[r]].clone());
        if !term.is_zero() {
            acc = acc.clone() + term.signed(sign);
        }
    });
    acc
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

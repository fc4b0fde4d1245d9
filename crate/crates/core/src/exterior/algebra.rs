//! Coefficient-level exterior algebra shared by pointwise values, callable
//! forms and grid forms. Coefficient vectors are indexed by the position of
//! the ordered multi-index in `enumerate_ordered(q, n)`.

use std::ops::{Add, Mul, Neg};

use crate::exterior::expr::Expr;
use crate::multiindex::{enumerate_ordered, Basis, MultiIndex};
use crate::C64;

/// Scalar ring the algebra is generic over.
pub trait Coeff: Clone + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;

    fn signed(self, sign: i32) -> Self {
        if sign < 0 {
            -self
        } else {
            self
        }
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Coeff for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
}

fn parity(count: u32) -> i32 {
    if count.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// σ(I, J) for two ordered, disjoint index sets given as bitmasks.
pub(crate) fn mask_concat_sign(i: u32, j: u32) -> i32 {
    let mut inversions = 0;
    let mut rest = j;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        inversions += (i >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    parity(inversions)
}

/// σ(j, I) for a single axis bit `j` placed in front of the ordered set `I`.
pub(crate) fn front_sign(axis_bit: u32, i: u32) -> i32 {
    parity((i & ((1u32 << axis_bit) - 1)).count_ones())
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        u32::MAX >> (32 - n)
    }
}

pub fn wedge_coeffs<T: Coeff>(n: usize, p: i32, a: &[T], q: i32, b: &[T]) -> Vec<T> {
    let target = Basis::new(p + q, n);
    let mut out = vec![T::zero(); target.len()];
    if target.len() == 0 {
        return out;
    }
    let left = enumerate_ordered(p, n);
    let right = enumerate_ordered(q, n);
    for (ia, i) in left.iter().enumerate() {
        if a[ia].is_zero() {
            continue;
        }
        let mi = i.mask();
        for (jb, j) in right.iter().enumerate() {
            let mj = j.mask();
            if mi & mj != 0 || b[jb].is_zero() {
                continue;
            }
            let k = target.position(mi | mj).expect("ordered union is a basis index");
            let term = (a[ia].clone() * b[jb].clone()).signed(mask_concat_sign(mi, mj));
            out[k] = out[k].clone() + term;
        }
    }
    out
}

/// Hodge star: `*dx^I = σ(I, I′) dx^{I′}`.
pub fn hodge_coeffs<T: Coeff>(n: usize, q: i32, a: &[T]) -> Vec<T> {
    let source = enumerate_ordered(q, n);
    let target = Basis::new(n as i32 - q, n);
    let mut out = vec![T::zero(); target.len()];
    let full = full_mask(n);
    for (ia, i) in source.iter().enumerate() {
        let mi = i.mask();
        let mc = full & !mi;
        let k = target.position(mc).expect("complement is a basis index");
        out[k] = a[ia].clone().signed(mask_concat_sign(mi, mc));
    }
    out
}

/// Exterior derivative given a partial-derivative oracle `partial(axis, component)`
/// (axis is 0-based, component is a position in the degree-`q` basis).
pub fn ext_d_coeffs<T: Coeff>(n: usize, q: i32, mut partial: impl FnMut(usize, usize) -> T) -> Vec<T> {
    let target = enumerate_ordered(q + 1, n);
    let source = Basis::new(q, n);
    target
        .iter()
        .map(|k| {
            let mk = k.mask();
            let mut acc = T::zero();
            for &axis in k.indices() {
                let bit = (axis - 1) as u32;
                let rest = mk & !(1 << bit);
                let pos = source.position(rest).expect("basis index");
                let term = partial(axis - 1, pos);
                if !term.is_zero() {
                    acc = acc + term.signed(front_sign(bit, rest));
                }
            }
            acc
        })
        .collect()
}

/// Coderivative by its local expansion `(δΦ)_I = Σ_{j∉I} σ(j, I) ∂_j Φ_{I+j}`.
pub fn codiff_local_coeffs<T: Coeff>(n: usize, q: i32, mut partial: impl FnMut(usize, usize) -> T) -> Vec<T> {
    let target = enumerate_ordered(q - 1, n);
    let source = Basis::new(q, n);
    target
        .iter()
        .map(|i| {
            let mi = i.mask();
            let mut acc = T::zero();
            for axis in 1..=n {
                let bit = (axis - 1) as u32;
                if mi & (1 << bit) != 0 {
                    continue;
                }
                let pos = source.position(mi | (1 << bit)).expect("basis index");
                let term = partial(axis - 1, pos);
                if !term.is_zero() {
                    acc = acc + term.signed(front_sign(bit, mi));
                }
            }
            acc
        })
        .collect()
}

/// A form evaluated at one point: complex coefficients on the ordered basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue {
    pub dim: usize,
    pub degree: i32,
    pub coeffs: Vec<C64>,
}

impl FormValue {
    pub fn new(dim: usize, degree: i32, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), enumerate_ordered(degree, dim).len(), "coefficient count");
        Self { dim, degree, coeffs }
    }

    pub fn zero(dim: usize, degree: i32) -> Self {
        let len = enumerate_ordered(degree, dim).len();
        Self { dim, degree, coeffs: vec![C64::new(0.0, 0.0); len] }
    }

    /// The 1-form `Σ v_i dx^i`.
    pub fn one_form(v: &[f64]) -> Self {
        Self::new(v.len(), 1, v.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn component(&self, index: &MultiIndex) -> C64 {
        let ord = index.ordered();
        let sign = crate::multiindex::perm_sign(index);
        Basis::new(self.degree, self.dim)
            .position(ord.mask())
            .map_or(C64::new(0.0, 0.0), |k| self.coeffs[k] * sign as f64)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let degree = self.degree + other.degree;
        let coeffs = wedge_coeffs(self.dim, self.degree, &self.coeffs, other.degree, &other.coeffs);
        Self { dim: self.dim, degree, coeffs }
    }

    pub fn hodge(&self) -> Self {
        let coeffs = hodge_coeffs(self.dim, self.degree, &self.coeffs);
        Self { dim: self.dim, degree: self.dim as i32 - self.degree, coeffs }
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        let s = s.into();
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

//! Scalar coefficient fields with analytic partial derivatives.
//!
//! An [`Expr`] is an immutable expression tree over the Cartesian coordinates
//! `x_1..x_N` (stored 0-based as `Var(0)..Var(N-1)`). Partials of every order
//! are exact; the tree is shared through `Arc`, so forms built from
//! expressions are cheap to clone and safe to evaluate concurrently.
//!
//! Coefficients that are only available as closures enter through a [`Leaf`],
//! which supplies its own first partials (or falls back to centered
//! differences).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::C64;

/// A black-box scalar function with optional analytic partials.
pub trait Leaf: Send + Sync {
    /// Number of real arguments.
    fn arity(&self) -> usize;
    fn eval(&self, x: &[f64]) -> C64;
    /// ∂_j of the leaf, written over the leaf's own arguments `Var(0..arity)`.
    fn partial(&self, j: usize) -> Expr;
    fn name(&self) -> String {
        "leaf".into()
    }
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

enum Node {
    Const(C64),
    Var(usize),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Powi(Expr, i32),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Sqrt(Expr),
    Apply(Arc<dyn Leaf>, Vec<Expr>),
    /// `inner ∘ args`, kept unexpanded so that each argument is evaluated once.
    Compose(Expr, Vec<Expr>),
}

impl Expr {
    pub fn constant(c: impl Into<C64>) -> Self {
        Expr(Arc::new(Node::Const(c.into())))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The coordinate `x_axis` with a 1-based axis label.
    pub fn coord(axis: usize) -> Self {
        assert!(axis >= 1, "axis labels are 1-based");
        Expr(Arc::new(Node::Var(axis - 1)))
    }

    pub(crate) fn var0(i: usize) -> Self {
        Expr(Arc::new(Node::Var(i)))
    }

    /// A leaf applied to the coordinates `x_1..x_arity`.
    pub fn leaf(leaf: Arc<dyn Leaf>) -> Self {
        let args = (0..leaf.arity()).map(Self::var0).collect();
        Expr(Arc::new(Node::Apply(leaf, args)))
    }

    /// A closure-backed field with no analytic partials (centered differences).
    pub fn from_fn(arity: usize, f: impl Fn(&[f64]) -> C64 + Send + Sync + 'static) -> Self {
        Self::leaf(Arc::new(FnLeaf { arity, f: Arc::new(f), partials: None, name: "fn".into() }))
    }

    /// A closure-backed field with analytic first partials `grad(x)[j] = ∂_{j+1} f(x)`.
    pub fn from_fn_with_grad(
        arity: usize,
        f: impl Fn(&[f64]) -> C64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<C64> + Send + Sync + 'static,
    ) -> Self {
        let grad: GradFn = Arc::new(grad);
        Self::leaf(Arc::new(FnLeaf { arity, f: Arc::new(f), partials: Some(grad), name: "fn".into() }))
    }

    pub fn as_const(&self) -> Option<C64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c == C64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c == C64::new(1.0, 0.0))
    }

    pub fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::one(),
            1 => self.clone(),
            _ => match self.as_const() {
                Some(c) => Self::constant(c.powi(k)),
                None => Expr(Arc::new(Node::Powi(self.clone(), k))),
            },
        }
    }

    pub fn sin(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.sin()),
            None => Expr(Arc::new(Node::Sin(self.clone()))),
        }
    }

    pub fn cos(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.cos()),
            None => Expr(Arc::new(Node::Cos(self.clone()))),
        }
    }

    pub fn exp(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.exp()),
            None => Expr(Arc::new(Node::Exp(self.clone()))),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.sqrt()),
            None => Expr(Arc::new(Node::Sqrt(self.clone()))),
        }
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        Self::constant(s) * self.clone()
    }

    /// Evaluates at a point of the ambient space.
    pub fn eval(&self, x: &[f64]) -> C64 {
        match &*self.0 {
            Node::Const(c) => *c,
            Node::Var(i) => C64::new(x[*i], 0.0),
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Powi(a, k) => a.eval(x).powi(*k),
            Node::Sin(a) => a.eval(x).sin(),
            Node::Cos(a) => a.eval(x).cos(),
            Node::Exp(a) => a.eval(x).exp(),
            Node::Sqrt(a) => a.eval(x).sqrt(),
            Node::Apply(leaf, args) => {
                // Leaves take real arguments; maps composed into them are real.
                let y: Vec<f64> = args.iter().map(|a| a.eval(x).re).collect();
                leaf.eval(&y)
            }
            Node::Compose(inner, args) => {
                let mut buf = [0.0; 8];
                if args.len() <= buf.len() {
                    for (b, a) in buf.iter_mut().zip(args) {
                        *b = a.eval(x).re;
                    }
                    inner.eval(&buf[..args.len()])
                } else {
                    let y: Vec<f64> = args.iter().map(|a| a.eval(x).re).collect();
                    inner.eval(&y)
                }
            }
        }
    }

    /// ∂_j with a 1-based axis label.
    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis >= 1, "axis labels are 1-based");
        self.d0(axis - 1)
    }

    fn d0(&self, j: usize) -> Self {
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Var(i) => {
                if *i == j {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Add(a, b) => a.d0(j) + b.d0(j),
            Node::Mul(a, b) => a.d0(j) * b.clone() + a.clone() * b.d0(j),
            Node::Powi(a, k) => a.powi(k - 1).scale(*k as f64) * a.d0(j),
            Node::Sin(a) => a.cos() * a.d0(j),
            Node::Cos(a) => -(a.sin() * a.d0(j)),
            Node::Exp(a) => self.clone() * a.d0(j),
            Node::Sqrt(a) => a.d0(j) * self.powi(-1).scale(0.5),
            Node::Apply(leaf, args) => {
                let mut acc = Self::zero();
                for (i, arg) in args.iter().enumerate() {
                    let inner = arg.d0(j);
                    if inner.is_zero() {
                        continue;
                    }
                    acc = acc + leaf.partial(i).substitute(args) * inner;
                }
                acc
            }
            Node::Compose(f, args) => {
                let mut acc = Self::zero();
                for (k, arg) in args.iter().enumerate() {
                    let inner = arg.d0(j);
                    if inner.is_zero() {
                        continue;
                    }
                    acc = acc + f.d0(k).substitute(args) * inner;
                }
                acc
            }
        }
    }

    /// Replaces every coordinate `x_i` by `args[i]` (composition `self ∘ args`).
    /// The arguments must be real-valued. Composite nodes are kept lazy, so
    /// repeated composition grows the tree additively.
    pub fn substitute(&self, args: &[Expr]) -> Self {
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(i) => args[*i].clone(),
            Node::Compose(f, inner) => {
                Expr(Arc::new(Node::Compose(f.clone(), inner.iter().map(|e| e.substitute(args)).collect())))
            }
            Node::Apply(leaf, inner) => Expr(Arc::new(Node::Apply(
                leaf.clone(),
                inner.iter().map(|e| e.substitute(args)).collect(),
            ))),
            _ => Expr(Arc::new(Node::Compose(self.clone(), args.to_vec()))),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Mul(a, b) => write!(f, "{a:?}*{b:?}"),
            Node::Powi(a, k) => write!(f, "{a:?}^{k}"),
            Node::Sin(a) => write!(f, "sin({a:?})"),
            Node::Cos(a) => write!(f, "cos({a:?})"),
            Node::Exp(a) => write!(f, "exp({a:?})"),
            Node::Sqrt(a) => write!(f, "sqrt({a:?})"),
            Node::Apply(l, _) => write!(f, "{}(..)", l.name()),
            Node::Compose(g, args) => write!(f, "({g:?})∘{args:?}"),
        }
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::constant(v)
    }
}

impl From<C64> for Expr {
    fn from(v: C64) -> Self {
        Expr::constant(v)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            _ => Expr(Arc::new(Node::Add(self, rhs))),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return rhs;
        }
        if rhs.is_one() {
            return self;
        }
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            _ => Expr(Arc::new(Node::Mul(self, rhs))),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::constant(-1.0) * self
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Add<f64> for Expr {
    type Output = Expr;
    fn add(self, rhs: f64) -> Expr {
        self + Expr::constant(rhs)
    }
}

impl Mul<f64> for Expr {
    type Output = Expr;
    fn mul(self, rhs: f64) -> Expr {
        self * Expr::constant(rhs)
    }
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<C64> + Send + Sync>;

struct FnLeaf {
    arity: usize,
    f: ScalarFn,
    partials: Option<GradFn>,
    name: String,
}

/// Step of the centered-difference fallback for leaves without partials.
const FD_STEP: f64 = 1e-5;

impl Leaf for FnLeaf {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, x: &[f64]) -> C64 {
        (self.f)(x)
    }

    fn partial(&self, j: usize) -> Expr {
        let name = format!("d{}{}", j + 1, self.name);
        let f: ScalarFn = match &self.partials {
            Some(g) => {
                let g = g.clone();
                Arc::new(move |x: &[f64]| g(x)[j])
            }
            None => {
                let f = self.f.clone();
                Arc::new(move |x: &[f64]| {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[j] += FD_STEP;
                    xm[j] -= FD_STEP;
                    (f(&xp) - f(&xm)) / (2.0 * FD_STEP)
                })
            }
        };
        Expr::leaf(Arc::new(FnLeaf { arity: self.arity, f, partials: None, name }))
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::algebra::{codiff_local_coeffs, ext_d_coeffs, hodge_coeffs, wedge_coeffs, Coeff, FormValue};
use crate::exterior::expr::Expr;
use crate::multiindex::{enumerate_ordered, perm_sign, sigma, Basis, MultiIndex};
use crate::C64;

/// Axis-aligned uniform grid; node `p` sits at `origin + p ⊙ spacing`.
/// Flattened storage is row-major with axis 1 slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl UniformGrid {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let n = origin.len();
        if spacing.len() != n || shape.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: spacing.len().min(shape.len()) });
        }
        if spacing.iter().any(|&h| h.is_nan() || h <= 0.0) {
            return Err(Error::InvalidArgument("grid spacing must be positive".into()));
        }
        Ok(Self { origin, spacing, shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut p = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            p[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        p
    }

    pub fn point(&self, node: &[usize]) -> Vec<f64> {
        node.iter().enumerate().map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a]).collect()
    }

    fn shrunk(&self) -> Self {
        Self { shape: self.shape.iter().map(|&s| s.saturating_sub(1)).collect(), ..self.clone() }
    }

    fn same_lattice(&self, other: &Self) -> bool {
        self.origin == other.origin && self.spacing == other.spacing
    }

    fn with_shape(&self, shape: Vec<usize>) -> Self {
        Self { shape, ..self.clone() }
    }
}

/// Grid-sampled coefficients, one flat array per ordered multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct GridData {
    pub grid: UniformGrid,
    pub values: Vec<Vec<C64>>,
}

impl GridData {
    /// Copies the values onto a sub-box of the same lattice anchored at the origin.
    fn restrict(&self, shape: &[usize]) -> Self {
        let target = self.grid.with_shape(shape.to_vec());
        let strides = self.grid.strides();
        let values = self
            .values
            .iter()
            .map(|v| {
                (0..target.len())
                    .map(|flat| {
                        let p = target.unravel(flat);
                        v[p.iter().zip(&strides).map(|(i, s)| i * s).sum::<usize>()]
                    })
                    .collect()
            })
            .collect();
        Self { grid: target, values }
    }

    /// Forward difference along 0-based `axis`, evaluated on the shrunk grid.
    fn forward_diff(&self, comp: usize, axis: usize) -> Vec<C64> {
        let target = self.grid.shrunk();
        let strides = self.grid.strides();
        let h = self.grid.spacing[axis];
        let v = &self.values[comp];
        (0..target.len())
            .map(|flat| {
                let p = target.unravel(flat);
                let base: usize = p.iter().zip(&strides).map(|(i, s)| i * s).sum();
                (v[base + strides[axis]] - v[base]) / h
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum Repr {
    Callable(Vec<Expr>),
    Grid(GridData),
}

/// A degree-`q` differential form on (a box in) `R^N` with one coefficient per
/// ordered multi-index. Degrees outside `0..=N` denote the zero form, which
/// has no components.
#[derive(Clone, Debug)]
pub struct FieldForm {
    dim: usize,
    degree: i32,
    repr: Repr,
}

impl FieldForm {
    /// Callable form from coefficients listed in `enumerate_ordered(q, N)` order.
    pub fn callable(dim: usize, degree: i32, components: Vec<Expr>) -> Result<Self> {
        let expected = enumerate_ordered(degree, dim).len();
        if components.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: components.len() });
        }
        Ok(Self { dim, degree, repr: Repr::Callable(components) })
    }

    /// Callable form from `(index, coefficient)` pairs. Unordered indices are
    /// sorted with the permutation sign; missing ones are zero.
    pub fn from_terms(dim: usize, degree: i32, terms: Vec<(MultiIndex, Expr)>) -> Result<Self> {
        let basis = Basis::new(degree, dim);
        let mut comps = vec![Expr::zero(); basis.len()];
        for (index, coeff) in terms {
            if index.len() as i32 != degree || index.indices().iter().any(|&i| i > dim) {
                return Err(Error::InvalidArgument(format!("{index} is not a degree-{degree} index in dimension {dim}")));
            }
            let k = basis.position(index.mask()).expect("valid index");
            comps[k] = comps[k].clone() + coeff.signed(perm_sign(&index));
        }
        Self::callable(dim, degree, comps)
    }

    pub fn zero(dim: usize, degree: i32) -> Self {
        let len = enumerate_ordered(degree, dim).len();
        Self { dim, degree, repr: Repr::Callable(vec![Expr::zero(); len]) }
    }

    /// A 0-form.
    pub fn scalar(dim: usize, f: Expr) -> Self {
        Self { dim, degree: 0, repr: Repr::Callable(vec![f]) }
    }

    /// The basis form `dx^I` (signed when `I` is unordered).
    pub fn basis(dim: usize, index: &MultiIndex) -> Result<Self> {
        Self::from_terms(dim, index.len() as i32, vec![(index.clone(), Expr::one())])
    }

    /// Grid form; `values[k]` holds the samples of the `k`-th ordered component.
    pub fn grid(dim: usize, degree: i32, grid: UniformGrid, values: Vec<Vec<C64>>) -> Result<Self> {
        if grid.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: grid.dim() });
        }
        let expected = enumerate_ordered(degree, dim).len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| v.len() != grid.len()) {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: v.len() });
        }
        Ok(Self { dim, degree, repr: Repr::Grid(GridData { grid, values }) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_callable(&self) -> bool {
        matches!(self.repr, Repr::Callable(_))
    }

    pub fn indices(&self) -> Vec<MultiIndex> {
        enumerate_ordered(self.degree, self.dim)
    }

    /// Callable coefficients in basis order, `None` for grid forms.
    pub fn components(&self) -> Option<&[Expr]> {
        match &self.repr {
            Repr::Callable(c) => Some(c),
            Repr::Grid(_) => None,
        }
    }

    /// Coefficient of `dx^I` (sign-adjusted for unordered `I`) of a callable form.
    pub fn component(&self, index: &MultiIndex) -> Option<Expr> {
        let comps = self.components()?;
        let k = Basis::new(self.degree, self.dim).position(index.mask())?;
        (index.len() as i32 == self.degree).then(|| comps[k].clone().signed(perm_sign(index)))
    }

    /// Pointwise value of a callable form.
    pub fn eval(&self, x: &[f64]) -> Result<FormValue> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        match &self.repr {
            Repr::Callable(c) => Ok(FormValue::new(self.dim, self.degree, c.iter().map(|e| e.eval(x)).collect())),
            Repr::Grid(_) => Err(Error::IncompatibleDomains("pointwise evaluation of a grid form".into())),
        }
    }

    /// Value at grid node `flat` of a grid form.
    pub fn node_value(&self, flat: usize) -> Option<FormValue> {
        match &self.repr {
            Repr::Grid(g) => Some(FormValue::new(self.dim, self.degree, g.values.iter().map(|v| v[flat]).collect())),
            Repr::Callable(_) => None,
        }
    }

    pub fn grid_data(&self) -> Option<&GridData> {
        match &self.repr {
            Repr::Grid(g) => Some(g),
            Repr::Callable(_) => None,
        }
    }

    /// Samples a callable form onto `grid`; grid forms are returned unchanged.
    pub fn sample(&self, grid: &UniformGrid) -> Result<Self> {
        match &self.repr {
            Repr::Grid(_) => Ok(self.clone()),
            Repr::Callable(c) => {
                let values = c
                    .iter()
                    .map(|e| (0..grid.len()).map(|f| e.eval(&grid.point(&grid.unravel(f)))).collect())
                    .collect();
                Self::grid(self.dim, self.degree, grid.clone(), values)
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// Brings two forms to a common representation: callable pairs stay
    /// callable; grid pairs are cut to their common sub-box; a callable
    /// partner is sampled on the grid of the other.
    fn align(&self, other: &Self) -> Result<(Repr, Repr)> {
        self.check_dim(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Callable(_), Repr::Callable(_)) => Ok((self.repr.clone(), other.repr.clone())),
            (Repr::Grid(a), Repr::Grid(b)) => {
                if !a.grid.same_lattice(&b.grid) {
                    return Err(Error::IncompatibleDomains("grids differ in origin or spacing".into()));
                }
                let shape: Vec<usize> = a.grid.shape.iter().zip(&b.grid.shape).map(|(x, y)| *x.min(y)).collect();
                Ok((Repr::Grid(a.restrict(&shape)), Repr::Grid(b.restrict(&shape))))
            }
            (Repr::Grid(a), Repr::Callable(_)) => Ok((self.repr.clone(), other.sample(&a.grid)?.repr)),
            (Repr::Callable(_), Repr::Grid(b)) => Ok((self.sample(&b.grid)?.repr, other.repr.clone())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::InvalidArgument(format!("degrees {} and {} differ", self.degree, other.degree)));
        }
        let repr = match self.align(other)? {
            (Repr::Callable(a), Repr::Callable(b)) => {
                Repr::Callable(a.into_iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Repr::Grid(a), Repr::Grid(b)) => Repr::Grid(GridData {
                values: a.values.iter().zip(&b.values).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()).collect(),
                grid: a.grid,
            }),
            _ => unreachable!("aligned representations match"),
        };
        Ok(Self { repr, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        let s = s.into();
        let repr = match &self.repr {
            Repr::Callable(c) => Repr::Callable(c.iter().map(|e| e.scale(s)).collect()),
            Repr::Grid(g) => Repr::Grid(GridData {
                grid: g.grid.clone(),
                values: g.values.iter().map(|v| v.iter().map(|x| x * s).collect()).collect(),
            }),
        };
        Self { repr, ..self.clone() }
    }

    /// Multiplication by a scalar field (callable forms only).
    pub fn mul_scalar(&self, f: &Expr) -> Result<Self> {
        match &self.repr {
            Repr::Callable(c) => Self::callable(self.dim, self.degree, c.iter().map(|e| f.clone() * e.clone()).collect()),
            Repr::Grid(_) => Err(Error::IncompatibleDomains("scalar-field product on a grid form".into())),
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let degree = self.degree + other.degree;
        let (p, q, n) = (self.degree, other.degree, self.dim);
        let repr = match self.align(other)? {
            (Repr::Callable(a), Repr::Callable(b)) => Repr::Callable(wedge_coeffs(n, p, &a, q, &b)),
            (Repr::Grid(a), Repr::Grid(b)) => {
                let len = enumerate_ordered(degree, n).len();
                let mut values = vec![Vec::with_capacity(a.grid.len()); len];
                for node in 0..a.grid.len() {
                    let x: Vec<C64> = a.values.iter().map(|v| v[node]).collect();
                    let y: Vec<C64> = b.values.iter().map(|v| v[node]).collect();
                    for (k, c) in wedge_coeffs(n, p, &x, q, &y).into_iter().enumerate() {
                        values[k].push(c);
                    }
                }
                Repr::Grid(GridData { grid: a.grid, values })
            }
            _ => unreachable!("aligned representations match"),
        };
        Ok(Self { dim: n, degree, repr })
    }

    /// Hodge star; out-of-range degrees map to the zero form of degree `N - q`.
    pub fn hodge(&self) -> Self {
        let (n, q) = (self.dim, self.degree);
        let repr = match &self.repr {
            Repr::Callable(c) => Repr::Callable(hodge_coeffs(n, q, c)),
            Repr::Grid(g) => {
                let len = enumerate_ordered(n as i32 - q, n).len();
                let mut values = vec![Vec::with_capacity(g.grid.len()); len];
                for node in 0..g.grid.len() {
                    let x: Vec<C64> = g.values.iter().map(|v| v[node]).collect();
                    for (k, c) in hodge_coeffs(n, q, &x).into_iter().enumerate() {
                        values[k].push(c);
                    }
                }
                Repr::Grid(GridData { grid: g.grid.clone(), values })
            }
        };
        Self { dim: n, degree: n as i32 - q, repr }
    }

    /// Exterior derivative. Grid forms use forward differences and lose one
    /// node per axis, so mixed differences commute and `d∘d` vanishes.
    pub fn ext_d(&self) -> Self {
        let (n, q) = (self.dim, self.degree);
        let repr = match &self.repr {
            Repr::Callable(c) => Repr::Callable(ext_d_coeffs(n, q, |axis, k| c[k].partial(axis + 1))),
            Repr::Grid(g) => Repr::Grid(GridData {
                grid: g.grid.shrunk(),
                values: ext_d_coeffs(n, q, |axis, k| GridVec(g.forward_diff(k, axis))).into_iter().map(|v| v.0).collect(),
            }),
        };
        let repr = fill_grid_zeros(repr);
        Self { dim: n, degree: q + 1, repr }
    }

    /// Coderivative `δ = σ_q * d *`.
    pub fn codiff(&self) -> Self {
        self.hodge().ext_d().hodge().scale(sigma(self.degree, self.dim) as f64)
    }

    /// Coderivative by the local expansion `(δΦ)_I = Σ_{j∉I} σ(j, I) ∂_j Φ_{I+j}`.
    pub fn codiff_local(&self) -> Self {
        let (n, q) = (self.dim, self.degree);
        let repr = match &self.repr {
            Repr::Callable(c) => Repr::Callable(codiff_local_coeffs(n, q, |axis, k| c[k].partial(axis + 1))),
            Repr::Grid(g) => Repr::Grid(GridData {
                grid: g.grid.shrunk(),
                values: codiff_local_coeffs(n, q, |axis, k| GridVec(g.forward_diff(k, axis)))
                    .into_iter()
                    .map(|v| v.0)
                    .collect(),
            }),
        };
        let repr = fill_grid_zeros(repr);
        Self { dim: n, degree: q - 1, repr }
    }

    /// Largest coefficient modulus over the given points (callable) or all
    /// nodes (grid; `points` ignored).
    pub fn max_abs(&self, points: &[Vec<f64>]) -> Result<f64> {
        match &self.repr {
            Repr::Callable(_) => {
                let mut m = 0.0f64;
                for p in points {
                    m = m.max(self.eval(p)?.max_abs());
                }
                Ok(m)
            }
            Repr::Grid(g) => Ok(g.values.iter().flatten().fold(0.0, |m, c| m.max(c.norm()))),
        }
    }

    /// JSON-ready document of a grid form (callable forms are sampled on `grid`).
    pub fn to_document(&self, grid: Option<&UniformGrid>) -> Result<FormDocument> {
        let form = match (&self.repr, grid) {
            (Repr::Grid(_), _) => self.clone(),
            (Repr::Callable(_), Some(g)) => self.sample(g)?,
            (Repr::Callable(_), None) => {
                return Err(Error::InvalidArgument("a grid is required to export a callable form".into()))
            }
        };
        let g = form.grid_data().expect("sampled");
        let components = form
            .indices()
            .into_iter()
            .zip(&g.values)
            .map(|(index, v)| ComponentDocument { index: index.indices().to_vec(), values: Nested::build(v, &g.grid.shape) })
            .collect();
        Ok(FormDocument { dim: self.dim, degree: self.degree, grid: g.grid.clone(), components })
    }

    pub fn from_document(doc: &FormDocument) -> Result<Self> {
        let basis = Basis::new(doc.degree, doc.dim);
        let mut values = vec![vec![C64::new(0.0, 0.0); doc.grid.len()]; basis.len()];
        for c in &doc.components {
            let index = MultiIndex::new(c.index.clone())?;
            let k = basis
                .position(index.mask())
                .filter(|_| index.is_ordered() && index.len() as i32 == doc.degree)
                .ok_or_else(|| Error::InvalidArgument(format!("component {index} does not fit degree {}", doc.degree)))?;
            let mut flat = Vec::with_capacity(doc.grid.len());
            c.values.flatten_into(&mut flat);
            if flat.len() != doc.grid.len() {
                return Err(Error::DimensionMismatch { expected: doc.grid.len(), found: flat.len() });
            }
            values[k] = flat;
        }
        Self::grid(doc.dim, doc.degree, doc.grid.clone(), values)
    }
}

/// Replaces empty placeholder arrays (the generic zero) by explicit zeros.
fn fill_grid_zeros(repr: Repr) -> Repr {
    match repr {
        Repr::Grid(mut g) => {
            let len = g.grid.len();
            for v in g.values.iter_mut().filter(|v| v.is_empty()) {
                *v = vec![C64::new(0.0, 0.0); len];
            }
            Repr::Grid(g)
        }
        other => other,
    }
}

/// Element-wise arithmetic on sampled arrays so the generic algebra can run on grids.
#[derive(Clone)]
struct GridVec(Vec<C64>);

impl std::ops::Add for GridVec {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.0.is_empty() {
            return rhs;
        }
        if rhs.0.is_empty() {
            return self;
        }
        GridVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Mul for GridVec {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GridVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a * b).collect())
    }
}

impl std::ops::Neg for GridVec {
    type Output = Self;
    fn neg(self) -> Self {
        GridVec(self.0.iter().map(|a| -a).collect())
    }
}

impl Coeff for GridVec {
    /// The empty array stands for the zero field of any length.
    fn zero() -> Self {
        GridVec(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Serialized grid form: `{N, q, grid, components}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormDocument {
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(rename = "q")]
    pub degree: i32,
    pub grid: UniformGrid,
    pub components: Vec<ComponentDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDocument {
    pub index: Vec<usize>,
    pub values: Nested,
}

/// Nested arrays following the grid shape, with `[re, im]` leaves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nested {
    Value([f64; 2]),
    Level(Vec<Nested>),
}

impl Nested {
    fn build(values: &[C64], shape: &[usize]) -> Self {
        match shape.split_first() {
            None => Nested::Value([values[0].re, values[0].im]),
            Some((&len, rest)) => {
                let block: usize = rest.iter().product();
                Nested::Level((0..len).map(|i| Self::build(&values[i * block..(i + 1) * block], rest)).collect())
            }
        }
    }

    fn flatten_into(&self, out: &mut Vec<C64>) {
        match self {
            Nested::Value([re, im]) => out.push(C64::new(*re, *im)),
            Nested::Level(v) => v.iter().for_each(|n| n.flatten_into(out)),
        }
    }
}

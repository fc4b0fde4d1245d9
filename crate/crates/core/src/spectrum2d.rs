//! Maxwell eigenforms on the upper half disk `{r < 1, 0 < φ < π}` for
//! degrees 0 and 1: closed forms built from `J_{n-1/2}`, radial Bessel
//! eigensolvers, a separable 2D mixed-boundary scalar solver, and the
//! coefficient expansion over the half-circle eigenbasis.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::{zeros_j, zeros_jprime, BesselOrder};
use crate::error::{Error, Result};
use crate::exterior::{ext_d_coeffs, FieldForm, FormValue};
use crate::linalg::{fit_line, SymTridiagonal};
use crate::multiindex::sigma;
use crate::polar::{bessel_j, phi, r, CircleForm, PolarForm};
use crate::quadrature::GaussLegendre;
use crate::spectrum1d::{analytic_pair, angular_matrix, normalization};
use crate::spherical::RadialProfile;
use crate::C64;

/// Largest mode index accepted by [`extract_coefficients`].
pub const MAX_EXPANSION_MODES: usize = 64;

/// Largest `M_r · M_φ` accepted by [`zaremba2d_eigensolve`].
pub const ZAREMBA_CELL_LIMIT: usize = 1_000_000;

/// Evaluation window used by [`maxwell_residual_2d`] unless told otherwise.
pub const ANNULUS: (f64, f64) = (0.05, 0.95);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    E,
    H,
}

/// A closed-form eigenpair `(E, H)` on the half disk, normalized so that
/// `‖E‖ = 1` in `L²`.
#[derive(Clone, Debug)]
pub struct EigenForm2D {
    pub q: i32,
    pub n: usize,
    pub m: usize,
    pub omega: f64,
    pub normalization: f64,
    pub e: PolarForm,
    pub h: PolarForm,
}

impl EigenForm2D {
    pub fn field(&self, kind: FieldKind) -> &PolarForm {
        match kind {
            FieldKind::E => &self.e,
            FieldKind::H => &self.h,
        }
    }

    /// The same pair multiplied by `s`.
    pub fn scaled(&self, s: impl Into<C64> + Copy) -> Self {
        Self { e: self.e.scale(s), h: self.h.scale(s), ..self.clone() }
    }
}

/// Metadata of an eigenform, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct EigenFormInfo {
    pub q: i32,
    pub n: usize,
    pub m: usize,
    pub omega: f64,
    pub lambda: f64,
    pub normalization: f64,
}

impl From<&EigenForm2D> for EigenFormInfo {
    fn from(f: &EigenForm2D) -> Self {
        Self { q: f.q, n: f.n, m: f.m, omega: f.omega, lambda: f.omega * f.omega, normalization: f.normalization }
    }
}

/// `ω_{n,m}`: the `m`-th zero of `J_{n-1/2}` for degree 0 and of its derivative for degree 1.
pub fn eigenfrequency(q: i32, n: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("radial mode index must be at least 1".into()));
    }
    let table = match q {
        0 => zeros_j(n, m)?,
        1 => zeros_jprime(n, m)?,
        _ => return Err(Error::InvalidArgument(format!("eigenforms exist for degrees 0 and 1, not {q}"))),
    };
    Ok(table.zeros[m - 1])
}

/// Builds the pair from the closed forms. Degree 0:
/// `E = J(ωr) cos(νφ)`, `H = iω⁻¹(J(ωr))′cos(νφ) dr − iνω⁻¹r⁻¹J(ωr) sin(νφ) r dφ`.
/// Degree 1: `E = −νω⁻¹r⁻¹J cos(νφ) dr + ω⁻¹(J(ωr))′ sin(νφ) r dφ`,
/// `H = −iJ(ωr) sin(νφ) dx¹∧dx²`.
pub fn analytic_eigenform(q: i32, n: usize, m: usize) -> Result<EigenForm2D> {
    let order = BesselOrder::new(n)?;
    let omega = eigenfrequency(q, n, m)?;
    let nu = order.nu();
    let bessel = bessel_j(n, r() * omega);
    let bessel_r = bessel.partial(1);
    let (cos, sin) = ((phi() * nu).cos(), (phi() * nu).sin());
    let i = C64::new(0.0, 1.0);
    let inv_r = r().powi(-1);
    let (e, h) = if q == 0 {
        let e = PolarForm::scalar(bessel.clone() * cos.clone());
        let h = PolarForm::one_form(
            (bessel_r * cos).scale(i / omega),
            (inv_r * bessel * sin).scale(-i * nu / omega),
        );
        (e, h)
    } else {
        let e = PolarForm::one_form(
            (inv_r * bessel.clone() * cos).scale(-nu / omega),
            (bessel_r * sin.clone()).scale(1.0 / omega),
        );
        let h = PolarForm::two_form((bessel * sin).scale(-i));
        (e, h)
    };
    let c = 1.0 / norm_sqr(&e, 0.0, 1.0).sqrt();
    Ok(EigenForm2D { q, n, m, omega, normalization: c, e: e.scale(c), h: h.scale(c) })
}

fn polar_gl() -> GaussLegendre {
    GaussLegendre::new(24)
}

/// `∫∫ |F|² r dr dφ` over `r0 < r < r1`, `0 < φ < π`, by tensor Gauss–Legendre.
pub fn norm_sqr(form: &PolarForm, r0: f64, r1: f64) -> f64 {
    inner(form, form, r0, r1).re
}

/// `∫∫ F·conj(G) r dr dφ` over `r0 < r < r1`, `0 < φ < π`.
pub fn inner(a: &PolarForm, b: &PolarForm, r0: f64, r1: f64) -> C64 {
    let gl = polar_gl();
    gl.integrate(r0, r1, 16, |rr| {
        gl.integrate(0.0, PI, 8, |p| {
            let (u, v) = (a.eval(rr, p), b.eval(rr, p));
            u.iter().zip(&v).map(|(x, y)| x * y.conj()).sum::<C64>() * rr
        })
    })
}

/// Boundary condition at `r = 1` for the radial Bessel operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialBoundary {
    /// `v(1) = 0`.
    Dirichlet,
    /// `v′(1) = 0`.
    Neumann,
}

/// Discretization of `−v″ − v′/r + ν²v/r²` on `(0, 1)` with `ν = n − 1/2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BesselOperator {
    pub order: BesselOrder,
    pub boundary: RadialBoundary,
    pub cells: usize,
}

impl BesselOperator {
    pub fn new(n: usize, boundary: RadialBoundary, cells: usize) -> Result<Self> {
        if cells < 64 {
            return Err(Error::InvalidArgument(format!("radial grid needs at least 64 cells, got {cells}")));
        }
        Ok(Self { order: BesselOrder::new(n)?, boundary, cells })
    }
}

/// Offset radial grid `r_i = (i − 1/2)h`: for Dirichlet `h = 1/(M + 1/2)` puts
/// the ghost node `r_{M+1}` on `r = 1`; for Neumann `h = 1/M` puts the last
/// face on `r = 1`.
fn radial_spacing(boundary: RadialBoundary, cells: usize) -> f64 {
    match boundary {
        RadialBoundary::Dirichlet => 1.0 / (cells as f64 + 0.5),
        RadialBoundary::Neumann => 1.0 / cells as f64,
    }
}

/// Finite-volume radial operator with `ν²` replaced by `shift`, symmetrized
/// by the `r`-weight: `W^{1/2} A W^{-1/2}` with `W = diag(r_i)`.
pub fn radial_matrix(shift: f64, boundary: RadialBoundary, cells: usize) -> SymTridiagonal {
    let h = radial_spacing(boundary, cells);
    let h2 = h * h;
    let node = |i: usize| (i as f64 + 0.5) * h;
    let face = |i: usize| (i + 1) as f64 * h;
    let diag = (0..cells)
        .map(|i| {
            let inner = if i == 0 { 0.0 } else { face(i - 1) };
            let outer = if i + 1 == cells && boundary == RadialBoundary::Neumann { 0.0 } else { face(i) };
            (inner + outer) / (node(i) * h2) + shift / node(i).powi(2)
        })
        .collect();
    let off = (0..cells - 1).map(|i| -face(i) / (h2 * (node(i) * node(i + 1)).sqrt())).collect();
    SymTridiagonal { diag, off }
}

/// Smallest `count` eigenvalues `ω²` of the radial operator.
pub fn radial_eigensolve(op: &BesselOperator, count: usize) -> Result<Vec<f64>> {
    let nu = op.order.nu();
    radial_matrix(nu * nu, op.boundary, op.cells).smallest_eigenvalues(count)
}

/// One eigenvalue of the 2D problem with the angular and radial indices of its separated factors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZarembaMode {
    pub lambda: f64,
    pub angular: usize,
    pub radial: usize,
}

/// Eigenvalues of `−Δu = λu` on the half disk with `u = 0` on the arc and on
/// the ray `φ = π`, `∂_φ u = 0` on the ray `φ = 0`.
///
/// The five-point polar stencil on the offset radial grid times the vertex
/// angular grid is a Kronecker sum `K ⊗ I + diag(r⁻²) ⊗ L`, so each angular
/// eigenvalue `μ_k` of `L` yields the exact radial block `K + μ_k diag(r⁻²)`.
/// Blocks are solved in parallel; only those with `μ_k` below the `count`-th
/// eigenvalue of the first block can contribute.
pub fn zaremba2d_eigensolve(radial_cells: usize, angular_cells: usize, count: usize) -> Result<Vec<ZarembaMode>> {
    let cells = radial_cells.saturating_mul(angular_cells);
    if cells > ZAREMBA_CELL_LIMIT {
        return Err(Error::GridTooLarge { cells, limit: ZAREMBA_CELL_LIMIT });
    }
    if radial_cells < 4 || angular_cells < 4 {
        return Err(Error::InvalidArgument("2D grid needs at least 4 cells per axis".into()));
    }
    if count == 0 || count > cells {
        return Err(Error::TooManyModes { requested: count, available: cells });
    }
    let angular = angular_matrix(angular_cells, PI);
    let block = |mu: f64| radial_matrix(mu, RadialBoundary::Dirichlet, radial_cells);
    let first = block(angular.eigenvalue(0));
    let bound = first.eigenvalue(count.min(radial_cells) - 1);
    let blocks = angular.count_below(bound).max(1);
    let mut modes: Vec<ZarembaMode> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let t = block(angular.eigenvalue(k));
            let take = count.min(radial_cells);
            (0..take).map(move |j| ZarembaMode { lambda: t.eigenvalue(j), angular: k + 1, radial: j + 1 })
        })
        .collect();
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    modes.truncate(count);
    Ok(modes)
}

/// The twelve coefficient families of a form over the half-circle eigenbasis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    AR,
    BR,
    CR,
    DR,
    AD,
    BD,
    CD,
    DD,
}

/// Which part of the form a family projects.
#[derive(Clone, Copy)]
enum Source {
    Form,
    Div,
    Rot,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::AR,
        Family::BR,
        Family::CR,
        Family::DR,
        Family::AD,
        Family::BD,
        Family::CD,
        Family::DD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::D => "d",
            Family::AR => "a^R",
            Family::BR => "b^R",
            Family::CR => "c^R",
            Family::DR => "d^R",
            Family::AD => "a^D",
            Family::BD => "b^D",
            Family::CD => "c^D",
            Family::DD => "d^D",
        }
    }

    /// The families of the form itself (as opposed to its `rot` or `div`).
    pub fn is_primary(self) -> bool {
        matches!(self, Family::A | Family::B | Family::C | Family::D)
    }

    /// Source part, whether the normal (`ρ`) part is taken, and whether the
    /// basis is of `E`-type (else `H`-type).
    fn layout(self) -> (Source, bool, bool) {
        use Family::*;
        let source = match self {
            A | B | C | D => Source::Form,
            AR | BR | CR | DR => Source::Rot,
            AD | BD | CD | DD => Source::Div,
        };
        let normal = matches!(self, A | B | AR | BR | AD | BD);
        let e_type = matches!(self, A | C | AR | CR | AD | CD);
        (source, normal, e_type)
    }
}

/// Radial coefficient functions of a form, one profile per mode `n = 1..=n_max`
/// for every family that exists at the form's degree.
#[derive(Clone, Debug, Serialize)]
pub struct RadialCoefficientSet {
    pub degree: i32,
    pub n_max: usize,
    pub families: Vec<(Family, Vec<RadialProfile>)>,
}

impl RadialCoefficientSet {
    pub fn get(&self, family: Family) -> Option<&[RadialProfile]> {
        self.families.iter().find(|(f, _)| *f == family).map(|(_, v)| v.as_slice())
    }

    pub fn cell_width(&self) -> f64 {
        self.families.first().and_then(|(_, v)| v.first()).map_or(0.0, |p| p.h)
    }

    /// `Σ_n ∫ r |u_n|² dr` over the primary families.
    pub fn weighted_norm_sqr(&self) -> f64 {
        self.families
            .iter()
            .filter(|(f, _)| f.is_primary())
            .flat_map(|(_, v)| v.iter())
            .map(|p| p.weighted_norm_sqr(2))
            .sum()
    }

    /// Primary `(family, mode)` pairs whose profile exceeds `tol` in maximum norm.
    pub fn significant_components(&self, tol: f64) -> Vec<(Family, usize)> {
        let mut out = Vec::new();
        for (f, profiles) in self.families.iter().filter(|(f, _)| f.is_primary()) {
            for (k, p) in profiles.iter().enumerate() {
                if p.values.iter().any(|v| v.norm() > tol) {
                    out.push((*f, k + 1));
                }
            }
        }
        out
    }
}

/// Composite Gauss–Legendre nodes and weights on `panels` equal panels of `[a, b]`.
fn panel_nodes(gl: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / panels as f64;
    (0..panels).flat_map(|p| gl.on(a + p as f64 * w, a + (p + 1) as f64 * w).collect::<Vec<_>>()).collect()
}

fn angular_nodes() -> Vec<(f64, f64)> {
    panel_nodes(&GaussLegendre::new(32), 0.0, PI, 16)
}

/// Projects `ρ` and `τ` parts of the form, its `rot` and its `div` onto the
/// half-circle basis `√(2/π) cos(νφ)` (0-forms) and `−i√(2/π) sin(νφ) dφ`
/// (1-forms) at the radial nodes `(i − 1/2)/M`.
pub fn extract_coefficients(form: &PolarForm, n_max: usize, cells: usize) -> Result<RadialCoefficientSet> {
    if n_max == 0 || n_max > MAX_EXPANSION_MODES {
        return Err(Error::InvalidArgument(format!("mode count must lie in 1..={MAX_EXPANSION_MODES}, got {n_max}")));
    }
    if cells < 4 {
        return Err(Error::InvalidArgument("radial grid needs at least 4 cells".into()));
    }
    let q = form.degree();
    let (rot, div) = (form.rot(), form.div());
    let nodes = angular_nodes();
    let c = normalization();
    let i = C64::new(0.0, 1.0);
    let mut families = Vec::new();
    for family in Family::ALL {
        let (source, normal, e_type) = family.layout();
        let src = match source {
            Source::Form => form,
            Source::Rot => &rot,
            Source::Div => &div,
        };
        if !(0..=2).contains(&src.degree()) {
            continue;
        }
        let part: CircleForm = if normal { src.rho() } else { src.tau() };
        let wanted = if e_type { 0 } else { 1 };
        if part.degree != wanted {
            continue;
        }
        let coeff = part.coeff;
        let profiles = (1..=n_max)
            .map(|n| {
                let nu = n as f64 - 0.5;
                RadialProfile::sample(1.0, cells, |rr| {
                    nodes
                        .iter()
                        .map(|&(p, w)| {
                            let basis = if e_type { C64::new(c * (nu * p).cos(), 0.0) } else { i * c * (nu * p).sin() };
                            coeff.eval(&[rr, p]) * basis * w
                        })
                        .sum()
                })
            })
            .collect();
        families.push((family, profiles));
    }
    Ok(RadialCoefficientSet { degree: q, n_max, families })
}

/// Relative deviation between `Σ ‖coefficients‖²` and `‖form‖²`, both with the
/// set's radial midpoint rule and the angular quadrature used for extraction.
pub fn parseval_defect(form: &PolarForm, set: &RadialCoefficientSet) -> f64 {
    let h = set.cell_width();
    let cells = (1.0 / h).round() as usize;
    let nodes = angular_nodes();
    let total: f64 = (0..cells)
        .map(|k| {
            let rr = (k as f64 + 0.5) * h;
            let ang: f64 = nodes.iter().map(|&(p, w)| form.eval(rr, p).iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sum();
            ang * rr * h
        })
        .sum();
    let coeffs = set.weighted_norm_sqr();
    if total == 0.0 {
        return coeffs;
    }
    (coeffs - total).abs() / total
}

/// Residual of one coefficient relation, summed in discrete `L²` over modes
/// and over the radial window `0.1 ≤ r ≤ 0.9`.
#[derive(Clone, Debug, Serialize)]
pub struct OdeResidual {
    pub relation: &'static str,
    /// `true` when the relation involves a radial derivative.
    pub differential: bool,
    pub norm: f64,
}

const WINDOW: (f64, f64) = (0.1, 0.9);

fn family_or_zero(set: &RadialCoefficientSet, family: Family, mode: usize) -> Option<&RadialProfile> {
    set.get(family).map(|v| &v[mode])
}

/// Sphere eigenfrequency `ω_m` of the half-circle pair `m`.
fn sphere_omega(m: usize) -> f64 {
    analytic_pair(m).map(|p| p.omega).expect("mode index is at least 1")
}

/// Residuals of the strong coefficient relations for `N = 2` and the
/// set's degree, with `ω_m = m − 1/2` and centered differences on the offset grid:
/// degree 0: `c = iω⁻¹ r d^R`, `c′ = a^R`;
/// degree 1: `(r d)′ = −iω a + r b^R`, `(r a)′ = r c^D + iω d`;
/// degree 2: `b = −iω⁻¹ r a^D`, `b′ = d^D`.
pub fn coeff_ode_residuals(set: &RadialCoefficientSet) -> Vec<OdeResidual> {
    let i = C64::new(0.0, 1.0);
    let h = set.cell_width();
    let cells = (1.0 / h).round() as usize;
    let nodes: Vec<usize> = (1..cells.saturating_sub(1))
        .filter(|&k| {
            let rr = (k as f64 + 0.5) * h;
            rr >= WINDOW.0 - 1e-12 && rr <= WINDOW.1 + 1e-12
        })
        .collect();
    let zero = C64::new(0.0, 0.0);
    let val = |f: Family, m: usize, k: usize| family_or_zero(set, f, m).map_or(zero, |p| p.values[k]);
    let node = |k: usize| (k as f64 + 0.5) * h;
    // Centered difference of r^p u at node k.
    let dr = |f: Family, m: usize, k: usize, p: i32| {
        (val(f, m, k + 1) * node(k + 1).powi(p) - val(f, m, k - 1) * node(k - 1).powi(p)) / (2.0 * h)
    };
    type Rel<'a> = (&'static str, bool, Box<dyn Fn(usize, usize) -> C64 + 'a>);
    let relations: Vec<Rel> = match set.degree {
        0 => vec![
            ("c = i r d^R / omega", false, Box::new(|m, k| val(Family::C, m, k) - i / sphere_omega(m + 1) * node(k) * val(Family::DR, m, k))),
            ("c' = a^R", true, Box::new(|m, k| dr(Family::C, m, k, 0) - val(Family::AR, m, k))),
        ],
        1 => vec![
            (
                "(r d)' = -i omega a + r b^R",
                true,
                Box::new(|m, k| {
                    dr(Family::D, m, k, 1) - (-i * sphere_omega(m + 1) * val(Family::A, m, k) + node(k) * val(Family::BR, m, k))
                }),
            ),
            (
                "(r a)' = r c^D + i omega d",
                true,
                Box::new(|m, k| {
                    dr(Family::A, m, k, 1) - (node(k) * val(Family::CD, m, k) + i * sphere_omega(m + 1) * val(Family::D, m, k))
                }),
            ),
        ],
        2 => vec![
            ("b = -i r a^D / omega", false, Box::new(|m, k| val(Family::B, m, k) + i / sphere_omega(m + 1) * node(k) * val(Family::AD, m, k))),
            ("b' = d^D", true, Box::new(|m, k| dr(Family::B, m, k, 0) - val(Family::DD, m, k))),
        ],
        _ => Vec::new(),
    };
    relations
        .into_iter()
        .map(|(relation, differential, f)| {
            let mut acc = 0.0;
            for m in 0..set.n_max {
                for &k in &nodes {
                    acc += f(m, k).norm_sqr() * h;
                }
            }
            OdeResidual { relation, differential, norm: acc.sqrt() }
        })
        .collect()
}

/// Residuals of the weak relations for degree 1, tested against
/// `ψ_j(r) = r²(1 − r) sin(jπr)`, `j = 1..=3`, which vanish at `r = 1`:
/// `∫ r a ψ′ = −iω ∫ d ψ − ∫ r c^D ψ` and `∫ r d ψ′ = iω ∫ a ψ − ∫ r b^R ψ`.
/// Integrals use the midpoint rule of the set; the maximum over `ψ_j` and modes is returned.
pub fn weak_relation_residuals(set: &RadialCoefficientSet) -> Result<[f64; 2]> {
    if set.degree != 1 {
        return Err(Error::InvalidArgument("weak relations are stated for degree 1".into()));
    }
    let i = C64::new(0.0, 1.0);
    let h = set.cell_width();
    let get = |f: Family| set.get(f).ok_or_else(|| Error::InvalidArgument(format!("family {} missing", f.name())));
    let (a, d, cd, br) = (get(Family::A)?, get(Family::D)?, get(Family::CD)?, get(Family::BR)?);
    let mut worst = [0.0f64; 2];
    for m in 0..set.n_max {
        let omega = sphere_omega(m + 1);
        for j in 1..=3 {
            let s = j as f64 * PI;
            let psi = |x: f64| x * x * (1.0 - x) * (s * x).sin();
            let dpsi = |x: f64| (2.0 * x - 3.0 * x * x) * (s * x).sin() + x * x * (1.0 - x) * s * (s * x).cos();
            let mut res = [C64::new(0.0, 0.0); 2];
            for k in 0..a[m].len() {
                let x = a[m].node(k);
                res[0] += (x * a[m].values[k] * dpsi(x) + i * omega * d[m].values[k] * psi(x) + x * cd[m].values[k] * psi(x)) * h;
                res[1] += (x * d[m].values[k] * dpsi(x) - i * omega * a[m].values[k] * psi(x) + x * br[m].values[k] * psi(x)) * h;
            }
            worst[0] = worst[0].max(res[0].norm());
            worst[1] = worst[1].max(res[1].norm());
        }
    }
    Ok(worst)
}

/// Observed orders of the differential relations under radial refinement
/// through `grids`, from a log-log fit. Algebraic relations are reported with
/// their largest residual instead.
#[derive(Clone, Debug, Serialize)]
pub struct RelationConvergence {
    pub relation: &'static str,
    pub differential: bool,
    pub residuals: Vec<f64>,
    pub order: Option<f64>,
}

pub fn coeff_ode_convergence(form: &PolarForm, n_max: usize, grids: &[usize]) -> Result<Vec<RelationConvergence>> {
    let mut runs = Vec::new();
    for &cells in grids {
        runs.push(coeff_ode_residuals(&extract_coefficients(form, n_max, cells)?));
    }
    let log_h: Vec<f64> = grids.iter().map(|&m| (1.0 / m as f64).ln()).collect();
    let relations = runs.first().map_or(0, Vec::len);
    Ok((0..relations)
        .map(|k| {
            let residuals: Vec<f64> = runs.iter().map(|r| r[k].norm).collect();
            let order = if residuals.iter().all(|&v| v > 1e-13) {
                Some(fit_line(&log_h, &residuals.iter().map(|v| v.ln()).collect::<Vec<_>>()).slope)
            } else {
                None
            };
            RelationConvergence { relation: runs[0][k].relation, differential: runs[0][k].differential, residuals, order }
        })
        .collect())
}

/// Derivatives used by [`maxwell_residual_2d`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Derivatives2D {
    /// Exact partials of the Cartesian component expressions.
    Analytic,
    /// Centered differences of step `h` in each Cartesian direction.
    FiniteDifference(f64),
}

fn fd_ext_d(form: &FieldForm, x: &[f64], h: f64) -> Result<FormValue> {
    let n = form.dim();
    let mut shifted = Vec::with_capacity(2 * n);
    for axis in 0..n {
        for s in [h, -h] {
            let mut y = x.to_vec();
            y[axis] += s;
            shifted.push(form.eval(&y)?);
        }
    }
    let coeffs = ext_d_coeffs(n, form.degree(), |axis, k| {
        (shifted[2 * axis].coeffs[k] - shifted[2 * axis + 1].coeffs[k]) / (2.0 * h)
    });
    Ok(FormValue::new(n, form.degree() + 1, coeffs))
}

fn fd_codiff(form: &FieldForm, x: &[f64], h: f64) -> Result<FormValue> {
    Ok(fd_ext_d(&form.hodge(), x, h)?.hodge().scale(sigma(form.degree(), form.dim()) as f64))
}

/// `L²` norms of `rot E + iωH` and `div H + iωE` over `r0 < r < r1`,
/// `0 < φ < π`, computed from the Cartesian components.
pub fn maxwell_residual_2d(pair: &EigenForm2D, window: (f64, f64), derivatives: Derivatives2D) -> Result<(f64, f64)> {
    if window.0 <= 0.0 || window.1 <= window.0 {
        return Err(Error::Origin);
    }
    let e = pair.e.to_cartesian();
    let h = pair.h.to_cartesian();
    let (rot_e, div_h) = (e.ext_d(), h.codiff());
    let iw = C64::new(0.0, pair.omega);
    let gl = polar_gl();
    let mut acc = [0.0f64; 2];
    let angular = panel_nodes(&gl, 0.0, PI, 8);
    for (rr, wr) in panel_nodes(&gl, window.0, window.1, 4) {
        for &(ph, wp) in &angular {
            let x = [rr * ph.cos(), rr * ph.sin()];
            let (re, dh) = match derivatives {
                Derivatives2D::Analytic => (rot_e.eval(&x)?, div_h.eval(&x)?),
                Derivatives2D::FiniteDifference(step) => (fd_ext_d(&e, &x, step)?, fd_codiff(&h, &x, step)?),
            };
            let w = wr * wp * rr;
            acc[0] += re.add(&h.eval(&x)?.scale(iw)).norm().powi(2) * w;
            acc[1] += dh.add(&e.eval(&x)?.scale(iw)).norm().powi(2) * w;
        }
    }
    Ok((acc[0].sqrt(), acc[1].sqrt()))
}

/// `(n, m, ω)` of the first `count` modes of degree `q` in ascending frequency.
pub fn modes_by_frequency(q: i32, count: usize) -> Result<Vec<(usize, usize, f64)>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut all: Vec<(usize, usize, f64)> = Vec::new();
    for n in 1..=crate::bessel::N_MAX {
        let zeros = match q {
            0 => zeros_j(n, count)?.zeros,
            1 => zeros_jprime(n, count)?.zeros,
            _ => return Err(Error::InvalidArgument(format!("no eigenforms of degree {q}"))),
        };
        let bound = if all.len() >= count { all[count - 1].2 } else { f64::INFINITY };
        if zeros[0] > bound {
            break;
        }
        all.extend(zeros.iter().enumerate().map(|(k, &w)| (n, k + 1, w)));
        all.sort_by(|a, b| a.2.total_cmp(&b.2));
    }
    all.truncate(count);
    Ok(all)
}

/// `max |G − I|` of the `E`-forms of the given modes, integrated by the
/// `points × points` midpoint rule in `(r, φ)` with weight `r`. Degree 2
/// has no eigenforms on the half disk, so its Gram matrix is empty.
pub fn gram_matrix_2d(q: i32, modes: &[(usize, usize)], points: usize) -> Result<(Vec<Vec<C64>>, f64)> {
    if q == 2 {
        return Ok((Vec::new(), 0.0));
    }
    let forms = modes.iter().map(|&(n, m)| analytic_eigenform(q, n, m)).collect::<Result<Vec<_>>>()?;
    let (hr, hp) = (1.0 / points as f64, PI / points as f64);
    let samples: Vec<Vec<Vec<C64>>> = forms
        .par_iter()
        .map(|f| {
            let mut v = Vec::with_capacity(points * points);
            for i in 0..points {
                let rr = (i as f64 + 0.5) * hr;
                for j in 0..points {
                    v.push(f.e.eval(rr, (j as f64 + 0.5) * hp));
                }
            }
            v
        })
        .collect();
    let k = forms.len();
    let mut gram = vec![vec![C64::new(0.0, 0.0); k]; k];
    let mut dev = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..points {
                let rr = (i as f64 + 0.5) * hr;
                for j in 0..points {
                    let idx = i * points + j;
                    s += samples[a][idx].iter().zip(&samples[b][idx]).map(|(x, y)| x * y.conj()).sum::<C64>() * rr;
                }
            }
            s *= hr * hp;
            gram[a][b] = s;
            let target = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((s - target).norm());
        }
    }
    Ok((gram, dev))
}

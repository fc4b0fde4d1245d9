use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use maxforms::bessel::{zeros_j, zeros_jprime, N_MAX};
use maxforms::dnfields::{dimension_check, ArcPartition, DiskMesh};
use maxforms::exterior::identity_report;
use maxforms::regularity::{classify, Verdict};
use maxforms::spectrum1d::fd_eigensolve;
use maxforms::spectrum2d::{
    analytic_eigenform, coeff_ode_residuals, extract_coefficients, modes_by_frequency, parseval_defect, radial_eigensolve,
    weak_relation_residuals, zaremba2d_eigensolve, BesselOperator, EigenFormInfo, FieldKind, RadialBoundary,
    MAX_EXPANSION_MODES,
};
use maxforms::{Error, Result};

use crate::output::{Report, Table};

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values are serializable")
}

fn report(config: Value, table: Table) -> Report {
    Report { config, results: Value::Null, residuals: Value::Null, table, violations: Vec::new() }
}

#[derive(Args, Debug)]
pub struct IdentitiesArgs {
    /// Ambient dimension.
    #[arg(long = "N", value_name = "N", value_parser = clap::value_parser!(u16).range(1..=8))]
    pub dim: u16,
    /// Tolerance for the calculus residuals.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

pub fn identities(a: &IdentitiesArgs) -> Result<Report> {
    let n = a.dim as usize;
    let r = identity_report(n)?;
    let mut table = Table::new(vec!["q", "identity", "residual"]);
    for s in &r.signs {
        table.push(vec![s.q.into(), s.identity.into(), (s.residual as f64).into()]);
    }
    for c in &r.calculus {
        table.push(vec![c.q.into(), c.identity.into(), c.residual.into()]);
    }
    let mut out = report(json!({ "command": "identities", "N": n, "tol": a.tol }), table);
    out.check(r.max_sign_residual() == 0, || "a sign identity fails".into());
    out.check(r.max_calculus_residual() <= a.tol, || {
        format!("calculus residual {:e} exceeds {:e}", r.max_calculus_residual(), a.tol)
    });
    out.residuals = json!({ "max_sign": r.max_sign_residual(), "max_calculus": r.max_calculus_residual() });
    out.results = to_value(&r);
    Ok(out)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ZeroKindArg {
    /// Zeros of the function.
    #[value(name = "fn")]
    Function,
    /// Zeros of the derivative.
    #[value(name = "dfn")]
    Derivative,
}

#[derive(Args, Debug)]
pub struct BesselArgs {
    /// Order index; the Bessel order is n - 1/2.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=N_MAX as i64))]
    pub n: u16,
    #[arg(long, value_enum, default_value = "fn")]
    pub kind: ZeroKindArg,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(1..=1000))]
    pub count: u16,
    /// Tolerance on |f(zero)|.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

pub fn bessel_zeros(a: &BesselArgs) -> Result<Report> {
    let (n, count) = (a.n as usize, a.count as usize);
    let table_data = match a.kind {
        ZeroKindArg::Function => zeros_j(n, count)?,
        ZeroKindArg::Derivative => zeros_jprime(n, count)?,
    };
    let mut table = Table::new(vec!["m", "zero", "residual"]);
    for (k, (z, r)) in table_data.zeros.iter().zip(&table_data.residuals).enumerate() {
        table.push(vec![(k + 1).into(), (*z).into(), (*r).into()]);
    }
    let worst = table_data.residuals.iter().cloned().fold(0.0, f64::max);
    let mut out = report(json!({ "command": "bessel-zeros", "n": n, "kind": table_data.kind, "count": count, "tol": a.tol }), table);
    out.check(worst <= a.tol, || format!("zero residual {worst:e} exceeds {:e}", a.tol));
    out.residuals = json!({ "max_residual": worst });
    out.results = to_value(&table_data);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct Eigen1dArgs {
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(1..=200))]
    pub modes: u16,
    /// Number of grid cells on the half circle.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u32).range(16..=1_000_000))]
    pub grid: u32,
    /// Relative tolerance against (k - 1/2)^2.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

pub fn eigen1d(a: &Eigen1dArgs) -> Result<Report> {
    let (count, m) = (a.modes as usize, a.grid as usize);
    if count >= m {
        return Err(Error::TooManyModes { requested: count, available: m - 1 });
    }
    let pairs = fd_eigensolve(m, count)?;
    let mut table = Table::new(vec!["k", "lambda_fd", "lambda_exact", "abs_err"]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (k, p) in pairs.iter().enumerate() {
        let exact = (k as f64 + 0.5).powi(2);
        let err = (p.lambda - exact).abs();
        worst = worst.max(err / exact);
        table.push(vec![(k + 1).into(), p.lambda.into(), exact.into(), err.into()]);
        rows.push(json!({ "k": k + 1, "lambda_fd": p.lambda, "lambda_exact": exact, "abs_err": err }));
    }
    let mut out = report(json!({ "command": "eigen1d", "modes": count, "grid": m, "tol": a.tol }), table);
    out.check(worst <= a.tol, || format!("relative eigenvalue error {worst:e} exceeds {:e}", a.tol));
    out.residuals = json!({ "max_rel_err": worst });
    out.results = Value::Array(rows);
    Ok(out)
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected Mr,Mphi, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size {t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Args, Debug)]
pub struct Eigen2dArgs {
    /// Form degree of E.
    #[arg(long, value_parser = clap::value_parser!(i32).range(0..=1))]
    pub q: i32,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=64))]
    pub modes: u16,
    /// Radial and angular cell counts. The radial count also sets the radial solver grid.
    #[arg(long, default_value = "512,512", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Relative tolerance against the squared Bessel zeros.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
}

pub fn eigen2d(a: &Eigen2dArgs) -> Result<Report> {
    let count = a.modes as usize;
    let (mr, mphi) = a.grid;
    let targets = modes_by_frequency(a.q, count)?;
    let mut table = Table::new(vec!["rank", "lambda_num", "lambda_bessel", "rel_err", "route"]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut push = |rank: usize, num: f64, exact: f64, route: &str, extra: Value, table: &mut Table| {
        let rel = (num - exact).abs() / exact;
        worst = worst.max(rel);
        table.push(vec![rank.into(), num.into(), exact.into(), rel.into(), route.into()]);
        rows.push(json!({ "rank": rank, "lambda_num": num, "lambda_bessel": exact, "rel_err": rel, "route": route, "mode": extra }));
    };
    if a.q == 0 {
        let modes = zaremba2d_eigensolve(mr, mphi, count)?;
        for (k, (mode, t)) in modes.iter().zip(&targets).enumerate() {
            let extra = json!({ "angular": mode.angular, "radial": mode.radial });
            push(k + 1, mode.lambda, t.2 * t.2, "zaremba2d", extra, &mut table);
        }
    }
    let boundary = if a.q == 0 { RadialBoundary::Dirichlet } else { RadialBoundary::Neumann };
    let route = if a.q == 0 { "radial-dirichlet" } else { "radial-neumann" };
    for (k, &(n, m, omega)) in targets.iter().enumerate() {
        let op = BesselOperator::new(n, boundary, mr)?;
        let lambda = radial_eigensolve(&op, m)?[m - 1];
        push(k + 1, lambda, omega * omega, route, json!({ "n": n, "m": m }), &mut table);
    }
    let forms = targets
        .iter()
        .map(|&(n, m, _)| analytic_eigenform(a.q, n, m).map(|f| to_value(&EigenFormInfo::from(&f))))
        .collect::<Result<Vec<_>>>()?;
    let config = json!({ "command": "eigen2d", "q": a.q, "modes": count, "grid": [mr, mphi], "tol": a.tol });
    let mut out = report(config, table);
    out.check(worst <= a.tol, || format!("relative eigenvalue error {worst:e} exceeds {:e}", a.tol));
    out.residuals = json!({ "max_rel_err": worst });
    out.results = json!({ "eigenvalues": rows, "eigenforms": forms });
    Ok(out)
}

/// Dirichlet arcs as parsed from the command line.
#[derive(Clone, Debug)]
pub struct ArcList(Vec<(f64, f64)>);

fn parse_arcs(s: &str) -> std::result::Result<ArcList, String> {
    s.split(',')
        .map(|arc| {
            let (a, b) = arc.split_once(':').ok_or_else(|| format!("expected start:end, got {arc:?}"))?;
            let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad angle {t:?}: {e}"));
            Ok((parse(a)?, parse(b)?))
        })
        .collect::<std::result::Result<_, _>>()
        .map(ArcList)
}

#[derive(Args, Debug)]
pub struct DnArgs {
    /// Dirichlet arcs as start:end pairs in radians, comma separated.
    #[arg(long, value_parser = parse_arcs, allow_hyphen_values = true)]
    pub arcs: ArcList,
    /// Mesh size.
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    /// Minimum singular-value gap.
    #[arg(long, default_value_t = 1e6)]
    pub gap: f64,
}

pub fn dn_fields(a: &DnArgs) -> Result<Report> {
    if !(a.h > 0.0 && a.h <= 0.5) {
        return Err(Error::InvalidArgument(format!("mesh size must lie in (0, 0.5], got {}", a.h)));
    }
    let partition = ArcPartition::new(a.arcs.0.clone())?;
    let mesh = DiskMesh::new(&partition, a.h)?;
    let r = dimension_check(&partition, &mesh)?;
    let k = r.arcs;
    let mut table = Table::new(vec!["index", "gram_eigenvalue", "eta_residual"]);
    for (i, (s, res)) in r.gram_eigenvalues.iter().zip(&r.residuals).enumerate() {
        table.push(vec![(i + 1).into(), (*s).into(), (*res).into()]);
    }
    let arcs: Vec<[f64; 2]> = a.arcs.0.iter().map(|&(s, e)| [s, e]).collect();
    let mut out = report(json!({ "command": "dn-fields", "arcs": arcs, "h": a.h, "gap": a.gap }), table);
    out.check(r.rank + 1 == k, || format!("rank {} differs from K - 1 = {}", r.rank, k - 1));
    out.check(r.gap >= a.gap, || format!("singular-value gap {:e} below {:e}", r.gap, a.gap));
    out.results = json!({
        "K": k,
        "rank": r.rank,
        "gap": r.gap,
        "nodes": r.nodes,
        "gram_eigenvalues": r.gram_eigenvalues,
    });
    out.residuals = to_value(&r.residuals);
    Ok(out)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldArg {
    #[value(name = "E", alias = "e")]
    E,
    #[value(name = "H", alias = "h")]
    H,
}

impl From<FieldArg> for FieldKind {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::E => FieldKind::E,
            FieldArg::H => FieldKind::H,
        }
    }
}

#[derive(Args, Debug)]
pub struct RegularityArgs {
    #[arg(long, value_parser = clap::value_parser!(i32).range(0..=1))]
    pub q: i32,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=N_MAX as i64))]
    pub n: u16,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=50))]
    pub m: u16,
    #[arg(long, value_enum)]
    pub field: FieldArg,
}

pub fn regularity(a: &RegularityArgs) -> Result<Report> {
    let r = classify(a.q, a.n as usize, a.m as usize, a.field.into())?;
    let mut table = Table::new(vec!["epsilon", "seminorm"]);
    for (e, s) in r.epsilons.iter().zip(&r.seminorms) {
        table.push(vec![(*e).into(), (*s).into()]);
    }
    let config = json!({ "command": "regularity", "q": a.q, "n": a.n, "m": a.m, "field": r.field });
    let mut out = report(config, table);
    out.check(r.verdict != Verdict::Indeterminate, || "indeterminate verdict".into());
    out.residuals = json!({ "r_squared": r.fit.r_squared });
    out.results = to_value(&r);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(long, value_parser = clap::value_parser!(i32).range(0..=1))]
    pub q: i32,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=N_MAX as i64))]
    pub n: u16,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=50))]
    pub m: u16,
    #[arg(long, value_enum, default_value = "E")]
    pub field: FieldArg,
    /// Number of angular modes in the expansion.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..=MAX_EXPANSION_MODES as i64))]
    pub modes: u16,
    /// Radial midpoint cells.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(4..=100_000))]
    pub cells: u32,
    /// Profiles with maximum modulus above this count as present.
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
    /// Tolerance on the relative Parseval defect.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn expand(a: &ExpandArgs) -> Result<Report> {
    let pair = analytic_eigenform(a.q, a.n as usize, a.m as usize)?;
    let form = pair.field(a.field.into());
    let set = extract_coefficients(form, a.modes as usize, a.cells as usize)?;
    let defect = parseval_defect(form, &set);
    let mut table = Table::new(vec!["family", "mode", "weighted_norm"]);
    let mut rows = Vec::new();
    for (family, profiles) in &set.families {
        for (k, p) in profiles.iter().enumerate() {
            let norm = p.weighted_norm_sqr(2).sqrt();
            table.push(vec![family.name().into(), (k + 1).into(), norm.into()]);
            rows.push(json!({ "family": family.name(), "mode": k + 1, "weighted_norm": norm }));
        }
    }
    let significant: Vec<Value> = set
        .significant_components(a.threshold)
        .into_iter()
        .map(|(f, k)| json!({ "family": f.name(), "mode": k }))
        .collect();
    let weak = if set.degree == 1 { Some(weak_relation_residuals(&set)?) } else { None };
    let config = json!({
        "command": "expand", "q": a.q, "n": a.n, "m": a.m, "field": FieldKind::from(a.field),
        "modes": a.modes, "cells": a.cells, "threshold": a.threshold, "tol": a.tol,
    });
    let mut out = report(config, table);
    out.check(defect <= a.tol, || format!("Parseval defect {defect:e} exceeds {:e}", a.tol));
    out.results = json!({
        "eigenform": to_value(&EigenFormInfo::from(&pair)),
        "degree": set.degree,
        "significant": significant,
        "profiles": rows,
    });
    out.residuals = json!({
        "parseval_defect": defect,
        "relations": to_value(&coeff_ode_residuals(&set)),
        "weak_relations": weak,
    });
    Ok(out)
}

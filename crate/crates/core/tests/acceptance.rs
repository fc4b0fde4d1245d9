//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{dyadic_grid_form, random_affine, random_form, random_nonlinear, random_points, rng, tan_root};
use maxforms::bessel::{interlacing_holds, zeros_j, zeros_jprime};
use maxforms::dnfields::{dimension_check, ArcPartition, DiskMesh};
use maxforms::exterior::FieldForm;
use maxforms::multiindex::{complement, concat_sign, kappa, perm_sign, sigma, sign_identity_residuals, MultiIndex};
use maxforms::polar::{phi, r, PolarForm};
use maxforms::regularity::{classify, Verdict, H1_SLOPE};
use maxforms::spectrum1d::{convergence_fit, fd_eigensolve, orthonormality_gram};
use maxforms::spectrum2d::{
    analytic_eigenform, coeff_ode_convergence, extract_coefficients, gram_matrix_2d, maxwell_residual_2d, modes_by_frequency,
    radial_eigensolve, zaremba2d_eigensolve, BesselOperator, Derivatives2D, Family, FieldKind, RadialBoundary, ANNULUS,
};
use maxforms::spherical::{relation_orders, RelationResiduals};

type Outcome = Result<String, String>;

fn require(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sign_identities() -> Outcome {
    let start = Instant::now();
    let mut failures = 0usize;
    let mut checked = 0usize;
    for n in 0..=8usize {
        for q in 0..=n as i32 {
            for (_, res) in sign_identity_residuals(q, n) {
                checked += 1;
                failures += (res != 0) as usize;
            }
        }
        // Concatenation law over every ordered pair of disjoint subsets of 1..=n.
        let subsets: Vec<MultiIndex> =
            (0u32..1 << n).map(|mask| MultiIndex::new((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect::<Vec<_>>()).unwrap()).collect();
        for a in &subsets {
            for b in subsets.iter().filter(|b| a.mask() & b.mask() == 0) {
                let sign = if (a.len() * b.len()) % 2 == 0 { 1 } else { -1 };
                let ab = concat_sign(a, b).unwrap();
                checked += 2;
                failures += (ab * concat_sign(b, a).unwrap() != sign) as usize;
                // σ(I, J) is the sign of the permutation sorting the concatenation.
                let joined = MultiIndex::new([a.indices(), b.indices()].concat()).unwrap();
                failures += (ab != perm_sign(&joined)) as usize;
            }
            let c = complement(a, n).unwrap();
            checked += 1;
            failures += (concat_sign(a, &c).unwrap() * concat_sign(&c, a).unwrap() != kappa(a.len() as i32, n)) as usize;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    require(failures == 0 && secs < 1.0, format!("{checked} checks, {failures} failures, {secs:.3} s"))
}

fn exterior_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = [0.0f64; 7];
    let mut forms = 0;
    for n in 1..=4usize {
        for q in 0..=n as i32 {
            for trial in 0..50u64 {
                let mut g = rng(1000 * n as u64 + 100 * q as u64 + trial);
                let phi = random_form(n, q, &mut g);
                let pts = random_points(n, 3, &mut g);
                let diff = |a: &FieldForm, b: &FieldForm| a.sub(b).unwrap().max_abs(&pts).unwrap();
                forms += 1;
                worst[0] = worst[0].max(phi.ext_d().ext_d().max_abs(&pts).unwrap());
                worst[1] = worst[1].max(dyadic_grid_form(n, q, 4, &mut g).ext_d().ext_d().max_abs(&[]).unwrap());
                worst[2] = worst[2].max(diff(&phi.hodge().hodge(), &phi.scale(kappa(q, n) as f64)));
                let via_hodge = phi.hodge().ext_d().hodge().scale(sigma(q, n) as f64);
                worst[3] = worst[3].max(diff(&via_hodge, &phi.codiff_local()));
                if q < n as i32 {
                    let p = (trial as i32) % (n as i32 - q);
                    let psi = random_form(n, p, &mut g);
                    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                    let lhs = phi.wedge(&psi).unwrap().ext_d();
                    let rhs = phi.ext_d().wedge(&psi).unwrap().add(&phi.wedge(&psi.ext_d()).unwrap().scale(sign)).unwrap();
                    worst[4] = worst[4].max(diff(&lhs, &rhs));
                    let tau = random_nonlinear(n, &mut g);
                    worst[5] = worst[5].max(diff(&tau.pullback(&phi).unwrap().ext_d(), &tau.pullback(&phi.ext_d()).unwrap()));
                }
                let tau = random_affine(n, &mut g);
                let back = tau.transform_eps(&tau.transform_mu(&phi, &pts).unwrap(), &pts).unwrap();
                worst[6] = worst[6].max(diff(&back, &phi));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let limits = [1e-12, 0.0, 0.0, 1e-12, 1e-8, 1e-8, 1e-10];
    let ok = worst.iter().zip(limits).all(|(w, l)| *w <= l) && secs < 30.0;
    require(
        ok,
        format!(
            "{forms} forms: dd {:.1e}, grid dd {:.1e}, ** {:.1e}, delta {:.1e}, Leibniz {:.1e}, naturality {:.1e}, eps-mu {:.1e}, {secs:.1} s",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5], worst[6]
        ),
    )
}

fn spherical_relations() -> Outcome {
    let forms = [
        PolarForm::scalar(r().powi(3) * (phi() * 1.5).cos() + r().exp() * phi().sin()),
        PolarForm::one_form(r().powi(2) * (phi() * 0.5).sin(), r().exp() * (phi() * 1.5).cos()),
        PolarForm::two_form(r().powi(3) * (phi() * 2.5).cos()),
    ];
    let samples = [(0.4, 0.3), (0.7, 1.9), (0.9, 2.8)];
    let mut seen = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for form in &forms {
        let orders = relation_orders(form, &samples, 0.04, 3).map_err(|e| e.to_string())?;
        for (k, o) in orders.iter().enumerate() {
            if let Some(o) = o {
                seen[k].push(*o);
            }
        }
    }
    let ok = seen.iter().all(|v| !v.is_empty() && v.iter().all(|o| (o - 2.0).abs() <= 0.3));
    let detail: Vec<String> =
        RelationResiduals::NAMES.iter().zip(&seen).map(|(n, v)| format!("{n} {:?}", v.iter().map(|o| (o * 100.0).round() / 100.0).collect::<Vec<_>>())).collect();
    require(ok, format!("orders: {}", detail.join(", ")))
}

fn half_circle_spectrum() -> Outcome {
    let start = Instant::now();
    let pairs = fd_eigensolve(2000, 5).map_err(|e| e.to_string())?;
    let rel = pairs.iter().enumerate().map(|(k, p)| (p.lambda - (k as f64 + 0.5).powi(2)).abs() / (k as f64 + 0.5).powi(2)).fold(0.0, f64::max);
    let fit = convergence_fit(&[250, 500, 1000, 2000], 5).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    require(
        rel <= 1e-3 && (fit.slope - 2.0).abs() <= 0.2 && secs < 5.0,
        format!("max rel err {rel:.2e} at M = 2000, slope {:.3}, {secs:.2} s", fit.slope),
    )
}

fn bessel_zeros() -> Outcome {
    let half = zeros_j(1, 10).map_err(|e| e.to_string())?;
    let pi_err = half.zeros.iter().enumerate().map(|(m, z)| (z - (m + 1) as f64 * PI).abs()).fold(0.0, f64::max);
    let first = zeros_j(2, 1).map_err(|e| e.to_string())?.zeros[0];
    let oracle = tan_root(1.0, 1);
    let dfirst = zeros_jprime(1, 1).map_err(|e| e.to_string())?.zeros[0];
    let doracle = tan_root(2.0, 0);
    let interlaced = (1..=6).all(|n| interlacing_holds(n, 10).unwrap_or(false));
    let ok = pi_err <= 1e-12
        && (first - oracle).abs() <= 1e-6
        && (first - 4.493409).abs() <= 1e-6
        && (dfirst - doracle).abs() <= 1e-6
        && (dfirst - 1.165561).abs() <= 1e-6
        && interlaced;
    require(
        ok,
        format!("m*pi err {pi_err:.1e}, j_3/2 {first:.9} (oracle {oracle:.9}), j'_1/2 {dfirst:.9} (oracle {doracle:.9}), interlacing {interlaced}"),
    )
}

fn three_routes() -> Outcome {
    let e = |x: maxforms::Error| x.to_string();
    let start = Instant::now();
    let zaremba = zaremba2d_eigensolve(512, 512, 4).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let dirichlet = modes_by_frequency(0, 4).map_err(e)?;
    let neumann = modes_by_frequency(1, 4).map_err(e)?;
    let mut worst = [0.0f64; 3];
    for (mode, &(_, _, w)) in zaremba.iter().zip(&dirichlet) {
        worst[0] = worst[0].max((mode.lambda - w * w).abs() / (w * w));
    }
    for (k, (targets, boundary)) in [(&dirichlet, RadialBoundary::Dirichlet), (&neumann, RadialBoundary::Neumann)].into_iter().enumerate() {
        for &(n, m, w) in targets.iter() {
            let lambda = radial_eigensolve(&BesselOperator::new(n, boundary, 1000).map_err(e)?, m).map_err(e)?[m - 1];
            worst[k + 1] = worst[k + 1].max((lambda - w * w).abs() / (w * w));
        }
    }
    require(
        worst.iter().all(|&w| w <= 0.01) && zaremba.len() == 4 && secs < 60.0,
        format!("rel err zaremba2d {:.1e}, radial-dirichlet {:.1e}, radial-neumann {:.1e}; 512x512 in {secs:.2} s", worst[0], worst[1], worst[2]),
    )
}

fn eigenform_verification() -> Outcome {
    let e = |x: maxforms::Error| x.to_string();
    let mut maxwell = 0.0f64;
    for q in 0..=1 {
        for n in 1..=3 {
            for m in 1..=2 {
                let f = analytic_eigenform(q, n, m).map_err(e)?;
                let (a, b) = maxwell_residual_2d(&f, ANNULUS, Derivatives2D::Analytic).map_err(e)?;
                maxwell = maxwell.max(a).max(b);
            }
        }
    }
    let mut orders = Vec::new();
    let mut algebraic = 0.0f64;
    let cases = [(0, 2, FieldKind::E), (1, 2, FieldKind::E), (1, 2, FieldKind::H)];
    for (q, n, field) in cases {
        let f = analytic_eigenform(q, n, 1).map_err(e)?;
        for rel in coeff_ode_convergence(f.field(field), 4, &[50, 100, 200, 400]).map_err(e)? {
            if rel.differential {
                orders.push(rel.order.unwrap_or(f64::NAN));
            } else {
                algebraic = rel.residuals.iter().fold(algebraic, |a, &v| a.max(v));
            }
        }
    }
    let mut collapse = true;
    for (q, n, m, field, family) in [(0, 1, 1, FieldKind::E, Family::C), (0, 3, 2, FieldKind::E, Family::C), (1, 2, 1, FieldKind::H, Family::B), (1, 3, 2, FieldKind::H, Family::B)] {
        let f = analytic_eigenform(q, n, m).map_err(e)?;
        let set = extract_coefficients(f.field(field), 8, 200).map_err(e)?;
        collapse &= set.significant_components(1e-8) == vec![(family, n)];
    }
    let orders_ok = !orders.is_empty() && orders.iter().all(|o| (o - 2.0).abs() <= 0.3);
    require(
        maxwell <= 1e-8 && orders_ok && algebraic <= 1e-10 && collapse,
        format!(
            "Maxwell {maxwell:.1e}, differential orders {:?}, algebraic {algebraic:.1e}, collapse {collapse}",
            orders.iter().map(|o| (o * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn dirichlet_neumann_dimension() -> Outcome {
    let e = |x: maxforms::Error| x.to_string();
    let mut details = Vec::new();
    let mut ok = true;
    for k in 1..=4 {
        let p = ArcPartition::equal(k, 0.5, 0.2).map_err(e)?;
        let start = Instant::now();
        let coarse = dimension_check(&p, &DiskMesh::new(&p, 0.05).map_err(e)?).map_err(e)?;
        let secs = start.elapsed().as_secs_f64();
        let fine = dimension_check(&p, &DiskMesh::new(&p, 0.025).map_err(e)?).map_err(e)?;
        ok &= coarse.rank == k - 1 && fine.rank == k - 1 && coarse.gap >= 1e6 && secs < 30.0;
        details.push(format!("K={k} rank {}/{} gap {:.1e} {secs:.2} s", coarse.rank, fine.rank, coarse.gap));
    }
    require(ok, details.join("; "))
}

fn regularity_table() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut cases = 0;
    let (mut singular_slopes, mut regular_min) = (Vec::new(), f64::INFINITY);
    for q in 0..=1 {
        for n in 1..=3 {
            for m in 1..=2 {
                for field in [FieldKind::E, FieldKind::H] {
                    let rep = classify(q, n, m, field).map_err(|x| x.to_string())?;
                    cases += 1;
                    let singular = n == 1 && ((q == 0 && field == FieldKind::H) || (q == 1 && field == FieldKind::E));
                    let good = if singular {
                        singular_slopes.push(rep.fit.slope);
                        rep.verdict == Verdict::NotH1 && (rep.fit.slope + 1.0).abs() <= 0.2
                    } else {
                        regular_min = regular_min.min(rep.fit.slope);
                        rep.verdict == Verdict::H1 && rep.fit.slope >= H1_SLOPE
                    };
                    if !good {
                        mismatches.push(format!("q={q} n={n} m={m} {field:?}: {:?} slope {:.3}", rep.verdict, rep.fit.slope));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    require(
        mismatches.is_empty(),
        format!(
            "{cases} cases, not-H1 slopes {:?}, min H1 slope {regular_min:.4}, {secs:.1} s{}",
            singular_slopes.iter().map(|s| (s * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            if mismatches.is_empty() { String::new() } else { format!("; mismatches: {}", mismatches.join(", ")) }
        ),
    )
}

fn orthonormality() -> Outcome {
    let e = |x: maxforms::Error| x.to_string();
    let one = orthonormality_gram(10, 20_000).map_err(e)?;
    let mut two = 0.0f64;
    for q in 0..=1 {
        let modes: Vec<(usize, usize)> = modes_by_frequency(q, 6).map_err(e)?.iter().map(|&(n, m, _)| (n, m)).collect();
        two = two.max(gram_matrix_2d(q, &modes, 400).map_err(e)?.1);
    }
    require(one <= 1e-10 && two <= 1e-4, format!("1D deviation {one:.1e}, 2D deviation {two:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("sign identities", sign_identities),
        ("exterior calculus", exterior_suite),
        ("spherical relations", spherical_relations),
        ("half-circle spectrum", half_circle_spectrum),
        ("Bessel zeros", bessel_zeros),
        ("half-disk spectrum, three routes", three_routes),
        ("eigenform verification", eigenform_verification),
        ("Dirichlet-Neumann dimension", dirichlet_neumann_dimension),
        ("regularity classification", regularity_table),
        ("orthonormality", orthonormality),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += outcome.is_err() as usize;
        println!("criterion {:>2} {tag} {name}: {detail}", k + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

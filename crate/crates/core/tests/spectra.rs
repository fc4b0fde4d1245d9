use std::f64::consts::PI;

use maxforms::bessel::{zeros_j, zeros_jprime};
use maxforms::spectrum1d::{
    analytic_pair, convergence_fit, fd_eigensolve, harmonic_kernel_dimension, maxwell_residual, orthonormality_gram,
    Derivatives,
};
use maxforms::spectrum2d::{
    analytic_eigenform, coeff_ode_convergence, extract_coefficients, gram_matrix_2d, maxwell_residual_2d, modes_by_frequency,
    parseval_defect, radial_eigensolve, weak_relation_residuals, zaremba2d_eigensolve, BesselOperator, Derivatives2D,
    Family, RadialBoundary, ANNULUS,
};

#[test]
fn half_circle_spectrum_converges_at_second_order() {
    let pairs = fd_eigensolve(2000, 5).unwrap();
    for (k, p) in pairs.iter().enumerate() {
        let exact = (k as f64 + 0.5).powi(2);
        assert!((p.lambda - exact).abs() <= 1e-3 * exact, "k = {k}: {}", p.lambda);
    }
    let fit = convergence_fit(&[250, 500, 1000, 2000], 5).unwrap();
    assert!((fit.slope - 2.0).abs() <= 0.2, "slope {}", fit.slope);
}

#[test]
fn discrete_eigenvectors_sample_the_cosines() {
    let m = 1000;
    let pairs = fd_eigensolve(m, 3).unwrap();
    for (k, p) in pairs.iter().enumerate() {
        let nu = k as f64 + 0.5;
        let worst = p
            .vector
            .iter()
            .enumerate()
            .map(|(j, v)| (v - (2.0 / PI).sqrt() * (nu * j as f64 * PI / m as f64).cos()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "mode {k}: {worst}");
    }
}

#[test]
fn half_circle_pairs_solve_maxwell() {
    for n in 1..=5 {
        let p = analytic_pair(n).unwrap();
        let (a, b) = maxwell_residual(&p, Derivatives::Analytic);
        assert!(a <= 1e-12 && b <= 1e-12);
        let coarse = maxwell_residual(&p, Derivatives::FiniteDifference(200));
        let fine = maxwell_residual(&p, Derivatives::FiniteDifference(400));
        let ratio = coarse.0 / fine.0;
        assert!((ratio - 4.0).abs() < 0.2, "n = {n}: ratio {ratio}");
    }
    assert!(orthonormality_gram(10, 20_000).unwrap() <= 1e-10);
    assert_eq!(harmonic_kernel_dimension(400, 1e-6).unwrap(), 0);
}

#[test]
fn three_routes_match_bessel_zeros() {
    let dirichlet = modes_by_frequency(0, 4).unwrap();
    let zaremba = zaremba2d_eigensolve(512, 512, 4).unwrap();
    for (mode, &(n, m, w)) in zaremba.iter().zip(&dirichlet) {
        assert!((mode.lambda - w * w).abs() <= 0.01 * w * w);
        assert_eq!((mode.angular, mode.radial), (n, m));
        let radial = radial_eigensolve(&BesselOperator::new(n, RadialBoundary::Dirichlet, 1000).unwrap(), m).unwrap();
        assert!((radial[m - 1] - w * w).abs() <= 0.01 * w * w);
    }
    for &(n, m, w) in &modes_by_frequency(1, 4).unwrap() {
        let radial = radial_eigensolve(&BesselOperator::new(n, RadialBoundary::Neumann, 1000).unwrap(), m).unwrap();
        assert!((radial[m - 1] - w * w).abs() <= 0.01 * w * w);
    }
    // The first frequencies are π, the first zero of J_{3/2}, and the first of J_{1/2}′.
    assert!((dirichlet[0].2 - PI).abs() < 1e-12);
    assert_eq!(dirichlet[1].2, zeros_j(2, 1).unwrap().zeros[0]);
    assert_eq!(modes_by_frequency(1, 1).unwrap()[0].2, zeros_jprime(1, 1).unwrap().zeros[0]);
}

#[test]
fn lowest_eigenform_matches_closed_form() {
    // ω = π, J_{1/2}(πr) = √(2/(π²r)) sin(πr); ‖J cos(φ/2)‖² = 1/(2π).
    let f = analytic_eigenform(0, 1, 1).unwrap();
    for &(rr, p) in &[(0.2f64, 0.3f64), (0.5, 1.7), (0.93, 3.0)] {
        let expected = 2.0 / (PI * rr).sqrt() * (PI * rr).sin() * (p / 2.0).cos();
        assert!((f.e.eval(rr, p)[0].re - expected).abs() < 1e-10);
    }
}

#[test]
fn eigenforms_satisfy_maxwell_and_boundary_conditions() {
    for q in 0..=1 {
        for n in 1..=3 {
            for m in 1..=2 {
                let f = analytic_eigenform(q, n, m).unwrap();
                let (a, b) = maxwell_residual_2d(&f, ANNULUS, Derivatives2D::Analytic).unwrap();
                assert!(a <= 1e-8 && b <= 1e-8, "q={q} n={n} m={m}: {a} {b}");
                for p in [0.4, 1.3, 2.9] {
                    // Tangential trace of E on the arc: the φ-component (q = 1) or the value (q = 0).
                    let tangential = *f.e.eval(1.0, p).last().unwrap();
                    assert!(tangential.norm() < 1e-10);
                }
                // On the ray φ = π the value (q = 0) or the radial, tangential component (q = 1) vanishes.
                assert!(f.e.eval(0.6, PI)[0].norm() < 1e-10);
                if q == 1 {
                    // Normal component on the ray φ = 0.
                    assert!(f.e.eval(0.6, 0.0)[1].norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn finite_difference_maxwell_residual_is_second_order() {
    let f = analytic_eigenform(1, 2, 1).unwrap();
    let coarse = maxwell_residual_2d(&f, ANNULUS, Derivatives2D::FiniteDifference(1e-2)).unwrap();
    let fine = maxwell_residual_2d(&f, ANNULUS, Derivatives2D::FiniteDifference(5e-3)).unwrap();
    assert!((coarse.0 / fine.0 - 4.0).abs() < 0.2);
    assert!((coarse.1 / fine.1 - 4.0).abs() < 0.2);
}

#[test]
fn series_collapse_and_coefficient_relations() {
    let f = analytic_eigenform(0, 2, 1).unwrap();
    let set = extract_coefficients(&f.e, 6, 200).unwrap();
    assert_eq!(set.significant_components(1e-8), vec![(Family::C, 2)]);
    assert!(parseval_defect(&f.e, &set) < 1e-8);
    let h = extract_coefficients(&analytic_eigenform(1, 3, 1).unwrap().h, 6, 200).unwrap();
    assert_eq!(h.significant_components(1e-8), vec![(Family::B, 3)]);

    let g = analytic_eigenform(1, 2, 1).unwrap();
    for rel in coeff_ode_convergence(&g.e, 4, &[50, 100, 200, 400]).unwrap() {
        if rel.differential {
            let o = rel.order.expect("nonzero residual");
            assert!((o - 2.0).abs() < 0.3, "{}: order {o}", rel.relation);
        }
    }
    let weak = weak_relation_residuals(&extract_coefficients(&g.e, 4, 200).unwrap()).unwrap();
    assert!(weak[0] < 1e-3 && weak[1] < 1e-3, "{weak:?}");
    for rel in coeff_ode_convergence(&f.e, 4, &[50, 100, 200]).unwrap() {
        if !rel.differential {
            assert!(rel.residuals.iter().all(|&r| r < 1e-10), "{}: {:?}", rel.relation, rel.residuals);
        }
    }
}

#[test]
fn two_dimensional_gram_is_near_identity() {
    for q in 0..=1 {
        let modes: Vec<(usize, usize)> = modes_by_frequency(q, 6).unwrap().iter().map(|&(n, m, _)| (n, m)).collect();
        let (gram, dev) = gram_matrix_2d(q, &modes, 400).unwrap();
        assert_eq!(gram.len(), 6);
        assert!(dev <= 1e-4, "q = {q}: {dev}");
    }
}

use std::f64::consts::PI;

use maxforms::dnfields::{boundary_constant_rank, dimension_check, solve_eta, ArcPartition, DiskMesh};
use proptest::prelude::*;

fn partition(k: usize) -> ArcPartition {
    ArcPartition::equal(k, 0.5, 0.2).unwrap()
}

#[test]
fn rank_is_arcs_minus_one_and_stable_under_refinement() {
    for k in 1..=4 {
        let p = partition(k);
        for h in [0.05, 0.025] {
            let mesh = DiskMesh::new(&p, h).unwrap();
            let r = dimension_check(&p, &mesh).unwrap();
            assert_eq!(r.rank, k - 1, "K = {k}, h = {h}: {:?}", r.gram_eigenvalues);
            assert!(r.gap >= 1e6, "K = {k}, h = {h}: gap {}", r.gap);
            assert!(r.residuals.iter().all(|&v| v <= 1e-10));
        }
        let mesh = DiskMesh::new(&p, 0.05).unwrap();
        assert_eq!(boundary_constant_rank(&p, &mesh).unwrap(), k - 1);
    }
}

#[test]
fn potentials_form_a_partition_of_unity() {
    let p = ArcPartition::new(vec![(0.1, 1.0), (2.0, 2.5), (3.5, 5.0)]).unwrap();
    let mesh = DiskMesh::new(&p, 0.05).unwrap();
    let etas: Vec<_> = (1..=3).map(|k| solve_eta(k, &p, &mesh).unwrap()).collect();
    for i in 0..mesh.nodes.len() {
        let s: f64 = etas.iter().map(|e| e.values[i]).sum();
        assert!((s - 1.0).abs() < 1e-8, "node {i}: {s}");
    }
}

#[test]
fn symmetric_pair_splits_the_centre_evenly() {
    // Rotation by π swaps the two arcs, so η₁ = η₂ = 1/2 at the origin in
    // the continuum; the discrete value converges towards it.
    let p = ArcPartition::new(vec![(0.0, 1.0), (PI, PI + 1.0)]).unwrap();
    let errors: Vec<f64> = [0.05, 0.025]
        .iter()
        .map(|&h| {
            let mesh = DiskMesh::new(&p, h).unwrap();
            let centre = mesh.nodes.iter().position(|x| x[0].hypot(x[1]) < 1e-12).expect("mesh has a centre node");
            (solve_eta(1, &p, &mesh).unwrap().values[centre] - 0.5).abs()
        })
        .collect();
    assert!(errors[0] < 1e-2 && errors[1] < 1e-3, "{errors:?}");
    assert!(errors[1] < errors[0], "{errors:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gram_spectrum_is_rotation_invariant(k in 2usize..=4, angle in 0.0f64..std::f64::consts::TAU) {
        let p = partition(k);
        let q = p.rotated(angle);
        let a = dimension_check(&p, &DiskMesh::new(&p, 0.05).unwrap()).unwrap();
        let b = dimension_check(&q, &DiskMesh::new(&q, 0.05).unwrap()).unwrap();
        prop_assert_eq!(a.rank, b.rank);
        for (x, y) in a.gram_eigenvalues.iter().zip(&b.gram_eigenvalues).take(k - 1) {
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }
}

mod common;

use std::f64::consts::LN_2;

use common::{jacobi_entropy, shannon};
use quasift::circuits::experiment::{bell_probabilities, thermal_populations};
use quasift::qlinalg::{ComplexMatrix, DensityMatrix};
use quasift::rng::rng_from_seed;
use quasift::tripartite::{
    check_preservation, cmi_identity, delta_mutual_information, evolve, random_setup,
    reference_setup, SetupFile, TripartiteSetup, REFERENCE_THETA1, REFERENCE_THETA2,
};

/// The controlled interaction flips `E` exactly when `s = 1`, so after
/// tracing out `E` every coherence between `s = 0` and `s = 1` is gone:
/// `rho'_RS` is `rho_RS` dephased in the computational basis of `S`. For a
/// Bell-diagonal input that leaves a diagonal state with weights
/// `a/2, b/2, b/2, a/2` (`a` the `Phi` weight), for any temperature.
fn dephased_delta_i(p: [f64; 4]) -> f64 {
    let a = p[0] + p[1];
    let b = p[2] + p[3];
    let before = 2.0 * LN_2 - shannon(&p);
    let after = 2.0 * LN_2 - shannon(&[a / 2.0, b / 2.0, b / 2.0, a / 2.0]);
    before - after
}

#[test]
fn reference_delta_i_matches_dephasing_closed_form() {
    let p = bell_probabilities(REFERENCE_THETA1, REFERENCE_THETA2);
    for beta in [0.25, 1.0, 3.0] {
        let ev =
            evolve(&reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, beta).unwrap()).unwrap();
        let delta = delta_mutual_information(&ev).unwrap();
        assert!((delta - dephased_delta_i(p)).abs() < 1e-12, "beta={beta}");
    }
}

#[test]
fn reference_final_pair_is_dephased() {
    let p = bell_probabilities(REFERENCE_THETA1, REFERENCE_THETA2);
    let (a, b) = (p[0] + p[1], p[2] + p[3]);
    let ev = evolve(&reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap()).unwrap();
    let rs = ev.rho_final.partial_trace(&[0, 1]).unwrap();
    let want = ComplexMatrix::diagonal(&[a / 2.0, b / 2.0, b / 2.0, a / 2.0]);
    assert!(rs.matrix().max_abs_diff(&want) < 1e-14);
    // The environment ends maximally mixed: half the time it was flipped.
    let e = ev.rho_final.partial_trace(&[2]).unwrap();
    assert!(
        e.matrix()
            .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
            < 1e-14
    );
}

#[test]
fn reference_populations() {
    let p = bell_probabilities(REFERENCE_THETA1, REFERENCE_THETA2);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    let (p0, p1) = thermal_populations(1.0);
    assert!((p0 - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
    assert!((p0 + p1 - 1.0).abs() < 1e-15);
    let ev = evolve(&reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap()).unwrap();
    let mut sorted = p;
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for (x, y) in ev.initial.rs.eigenvalues.iter().zip(&sorted) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn mutual_information_agrees_with_jacobi_oracle() {
    let mut rng = rng_from_seed(31);
    for dims in [(2, 2, 2), (2, 3, 2), (3, 2, 2)] {
        let ev = evolve(&random_setup(dims, &mut rng).unwrap()).unwrap();
        let mi = |rho: &DensityMatrix| {
            let r = rho.partial_trace(&[0]).unwrap();
            let s = rho.partial_trace(&[1]).unwrap();
            let rs = rho.partial_trace(&[0, 1]).unwrap();
            jacobi_entropy(&r) + jacobi_entropy(&s) - jacobi_entropy(&rs)
        };
        let oracle = mi(&ev.rho_initial) - mi(&ev.rho_final);
        assert!(
            (delta_mutual_information(&ev).unwrap() - oracle).abs() < 1e-10,
            "{dims:?}"
        );
    }
}

#[test]
fn identities_hold_on_random_setups() {
    let mut rng = rng_from_seed(8);
    for _ in 0..20 {
        let ev = evolve(&random_setup((2, 2, 2), &mut rng).unwrap()).unwrap();
        let delta = delta_mutual_information(&ev).unwrap();
        assert!(delta >= -1e-9);
        let (before, after) = check_preservation(&ev).unwrap();
        assert!((before - after).abs() < 1e-9);
        let (d, cmi) = cmi_identity(&ev).unwrap();
        assert!((d - delta).abs() < 1e-12);
        assert!((d - cmi).abs() < 1e-9);
        // Local dynamics on S E leave the reference alone.
        let r0 = ev.rho_initial.partial_trace(&[0]).unwrap();
        let r1 = ev.rho_final.partial_trace(&[0]).unwrap();
        assert!(r0.matrix().max_abs_diff(r1.matrix()) < 1e-12);
    }
}

#[test]
fn identity_interaction_changes_nothing() {
    let mut rng = rng_from_seed(3);
    let setup = random_setup((2, 2, 2), &mut rng).unwrap();
    let ev = evolve(&setup.with_unitary(ComplexMatrix::identity(4)).unwrap()).unwrap();
    assert!(delta_mutual_information(&ev).unwrap().abs() < 1e-12);
}

#[test]
fn setup_file_round_trip() {
    let mut rng = rng_from_seed(12);
    let setup = random_setup((2, 3, 2), &mut rng).unwrap();
    let json = serde_json::to_string(&setup.to_file()).unwrap();
    let file: SetupFile = serde_json::from_str(&json).unwrap();
    let back = TripartiteSetup::from_file(&file).unwrap();
    assert_eq!(back.dims(), (2, 3, 2));
    assert!(back.rho_rs().matrix().max_abs_diff(setup.rho_rs().matrix()) == 0.0);
    assert!(back.rho_e().matrix().max_abs_diff(setup.rho_e().matrix()) == 0.0);
    assert!(back.u_se().max_abs_diff(setup.u_se()) == 0.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("setup.json");
    std::fs::write(&path, &json).unwrap();
    assert!(TripartiteSetup::load(&path).is_ok());
}

#[test]
fn malformed_setups_are_rejected() {
    let rho_rs = DensityMatrix::maximally_mixed(vec![2, 2]);
    let rho_e = DensityMatrix::maximally_mixed(vec![2]);
    let not_unitary = ComplexMatrix::identity(4).scale_real(2.0);
    assert!(
        TripartiteSetup::new(rho_rs.clone(), rho_e.clone(), not_unitary, (2, 2, 2), "x").is_err()
    );
    let small = ComplexMatrix::identity(2);
    assert!(TripartiteSetup::new(rho_rs.clone(), rho_e.clone(), small, (2, 2, 2), "x").is_err());
    assert!(
        TripartiteSetup::new(rho_rs, rho_e, ComplexMatrix::identity(6), (2, 3, 2), "x").is_err()
    );
}

mod common;

use std::f64::consts::FRAC_PI_2;

use common::reference_amplitude;
use num_complex::Complex64;
use quasift::circuits::experiment::{bell_probabilities, thermal_populations};
use quasift::circuits::{Circuit, NoiseModel, ReadoutError};
use quasift::interferometry::{
    assemble_quasiprobability, estimate_amplitude, exact_interference_probabilities, exact_table,
    family_tasks, invert_amplitude, select_mitigation_angle, simulated_interference_probabilities,
    AmplitudeFamily, AmplitudePart, AmplitudeTables, AmplitudeTask, LabelAlignment,
};
use quasift::qlinalg::ComplexMatrix;
use quasift::trajectories::{quasiprobability, ProjectorOrdering};
use quasift::tripartite::{evolve, reference_setup, REFERENCE_THETA1, REFERENCE_THETA2};
use quasift::Error;

fn tables() -> AmplitudeTables {
    AmplitudeTables::new(
        exact_table(AmplitudeFamily::BellOverlap).unwrap(),
        exact_table(AmplitudeFamily::Interaction).unwrap(),
        exact_table(AmplitudeFamily::Return).unwrap(),
    )
    .unwrap()
}

/// One qubit in `|+>`, payload `diag(1, e^{i phi})`: `<+|U|+> = (1 + e^{i phi}) / 2`.
fn phase_task(phi: f64, theta: f64, part: AmplitudePart) -> AmplitudeTask {
    let mut prep = Circuit::new(1).unwrap();
    prep.h(0).unwrap();
    let u = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (1, 1) => Complex64::from_polar(1.0, phi),
        _ => Complex64::new(0.0, 0.0),
    });
    AmplitudeTask::new("phase", u, prep, None, theta, part).unwrap()
}

#[test]
fn exact_tables_match_hand_amplitudes() {
    for family in AmplitudeFamily::ALL {
        let table = exact_table(family).unwrap();
        assert_eq!(table.entries.len(), family.labels().len());
        for entry in &table.entries {
            let want = reference_amplitude(family, &entry.labels);
            let got = entry.value();
            assert!(
                (got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12,
                "{family:?} {:?}",
                entry.labels
            );
            assert!((entry.exact_value() - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn circuit_probabilities_match_closed_forms() {
    for family in AmplitudeFamily::ALL {
        for (labels, task) in family_tasks(family).unwrap().into_iter().step_by(5) {
            for theta in [0.4, FRAC_PI_2, 2.3] {
                for part in AmplitudePart::BOTH {
                    let task = task.with_theta(theta).with_part(part);
                    let (p0, p1) = exact_interference_probabilities(&task).unwrap();
                    let (s0, s1) = simulated_interference_probabilities(&task).unwrap();
                    assert!(
                        (p0 - s0).abs() < 1e-12 && (p1 - s1).abs() < 1e-12,
                        "{family:?} {labels:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn inversion_recovers_both_parts() {
    for phi in [0.0, 0.8, 2.5, -1.2] {
        let a = (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phi)) / 2.0;
        for theta in [0.3, FRAC_PI_2, 1.1, 2.9] {
            let re = phase_task(phi, theta, AmplitudePart::Real);
            let (p0, p1) = simulated_interference_probabilities(&re).unwrap();
            assert!((invert_amplitude(p0, p1, theta).unwrap() - a.re).abs() < 1e-12);
            // The RX variant reads out -Im a.
            let im = phase_task(phi, theta, AmplitudePart::Imag);
            let (p0, p1) = simulated_interference_probabilities(&im).unwrap();
            assert!((invert_amplitude(p0, p1, theta).unwrap() + a.im).abs() < 1e-12);
        }
    }
}

#[test]
fn degenerate_angles_are_rejected() {
    let task = phase_task(0.5, std::f64::consts::PI, AmplitudePart::Real);
    assert!(matches!(
        estimate_amplitude(&task, 100, None, 1),
        Err(Error::DegenerateAngle(_))
    ));
    assert!(matches!(
        invert_amplitude(0.3, 0.3, 1e-9),
        Err(Error::DegenerateAngle(_))
    ));
}

#[test]
fn estimates_scatter_as_predicted() {
    let task = phase_task(1.0, 1.2, AmplitudePart::Imag);
    let exact = task.exact_amplitude().unwrap().im;
    let shots = 2000;
    let runs: Vec<_> = (0..300)
        .map(|seed| estimate_amplitude(&task, shots, None, seed).unwrap())
        .collect();
    let n = runs.len() as f64;
    let mean = runs.iter().map(|e| e.value).sum::<f64>() / n;
    let var = runs.iter().map(|e| (e.value - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let predicted = runs.iter().map(|e| e.variance).sum::<f64>() / n;
    assert!(
        (mean - exact).abs() < 5.0 * (var / n).sqrt(),
        "mean {mean} vs {exact}"
    );
    assert!((var / predicted - 1.0).abs() < 0.25, "{var} vs {predicted}");
    let mag = runs.iter().map(|e| e.magnitude_sq).sum::<f64>() / n;
    assert!((mag - task.exact_amplitude().unwrap().norm_sqr()).abs() < 0.01);
    // Same seed, same estimate.
    assert_eq!(
        estimate_amplitude(&task, shots, None, 7).unwrap(),
        estimate_amplitude(&task, shots, None, 7).unwrap()
    );
}

#[test]
fn mitigation_never_loses_to_the_quarter_turn() {
    let noise = NoiseModel::new(0.0, 0.01, ReadoutError::symmetric(0.012)).unwrap();
    for family in AmplitudeFamily::ALL {
        for (labels, task) in family_tasks(family).unwrap().into_iter().step_by(7) {
            let m = select_mitigation_angle(&task, &noise).unwrap();
            assert!(m.residual <= m.baseline_residual, "{family:?} {labels:?}");
            assert!(m.theta.sin().abs() >= 0.1);
        }
    }
    // Without noise the inversion is exact at every angle.
    let (_, task) = family_tasks(AmplitudeFamily::Interaction)
        .unwrap()
        .remove(3);
    let m = select_mitigation_angle(&task, &NoiseModel::ideal()).unwrap();
    assert!(m.residual < 1e-12 && m.baseline_residual < 1e-12);
}

#[test]
fn assembly_matches_the_engine() {
    let p = bell_probabilities(REFERENCE_THETA1, REFERENCE_THETA2);
    let (p0, p1) = thermal_populations(1.0);
    let assembled = assemble_quasiprobability(&tables(), &p, &[p0, p1]).unwrap();
    let ev = evolve(&reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap()).unwrap();
    let align = LabelAlignment::new(&ev).unwrap();
    let engine =
        align.engine_to_reference(&quasiprobability(&ev, ProjectorOrdering::Canonical).unwrap());
    let mut worst: f64 = 0.0;
    for (z, w) in engine.iter() {
        worst = worst.max((w - assembled.get(&z)).abs());
    }
    assert!(worst < 1e-10, "{worst}");
    assert!((assembled.total() - 1.0).abs() < 1e-12);
}

#[test]
fn alignment_round_trips() {
    let ev = evolve(&reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap()).unwrap();
    let align = LabelAlignment::new(&ev).unwrap();
    let q = quasiprobability(&ev, ProjectorOrdering::Canonical).unwrap();
    let back = align.reference_to_engine(&align.engine_to_reference(&q));
    for (z, w) in q.iter() {
        assert_eq!(back.get(&z), w);
        assert_eq!(align.to_engine(&align.to_reference(&z)), z);
    }
}

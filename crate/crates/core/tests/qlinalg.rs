mod common;

use std::f64::consts::LN_2;

use common::{c, jacobi_eigenvalues, shannon};
use num_complex::Complex64;
use quasift::qlinalg::random::{haar_unitary, random_hermitian, wishart_state};
use quasift::qlinalg::{
    hermitian_eig, unitary_from_hermitian, ComplexMatrix, DensityMatrix, EigOptions,
};
use quasift::rng::rng_from_seed;

fn bell() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&[c(h), c(0.0), c(0.0), c(h)], vec![2, 2]).unwrap()
}

#[test]
fn bell_pair_entropies() {
    let rho = bell();
    assert!(rho.von_neumann_entropy().abs() < 1e-12);
    let r = rho.partial_trace(&[0]).unwrap();
    assert!(
        r.matrix()
            .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
            < 1e-15
    );
    assert!((r.von_neumann_entropy() - LN_2).abs() < 1e-12);
    assert!((rho.mutual_information(&[0], &[1]).unwrap() - 2.0 * LN_2).abs() < 1e-12);
}

#[test]
fn diagonal_state_entropy_is_shannon() {
    let p = [0.5, 0.25, 0.125, 0.125];
    let rho = DensityMatrix::new(ComplexMatrix::diagonal(&p), vec![4]).unwrap();
    // 1.75 bits.
    assert!((rho.von_neumann_entropy() - 1.75 * LN_2).abs() < 1e-13);
}

#[test]
fn entropy_agrees_with_jacobi_oracle() {
    let mut rng = rng_from_seed(5);
    for d in [2, 3, 4, 6, 8] {
        let rho = DensityMatrix::new(wishart_state(d, &mut rng), vec![d]).unwrap();
        let oracle = shannon(
            &jacobi_eigenvalues(rho.matrix())
                .into_iter()
                .map(|x| x.max(0.0))
                .collect::<Vec<_>>(),
        );
        assert!((rho.von_neumann_entropy() - oracle).abs() < 1e-10, "d={d}");
    }
}

#[test]
fn eigendecomposition_reconstructs_and_is_orthonormal() {
    let mut rng = rng_from_seed(9);
    for d in [2, 3, 5, 8] {
        let h = random_hermitian(d, &mut rng);
        let eig = hermitian_eig(&h, &EigOptions::default()).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&h) < 1e-12);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let oracle = jacobi_eigenvalues(&h);
        for (a, b) in eig.eigenvalues.iter().rev().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }
        let v = ComplexMatrix::from_columns(&eig.basis_vectors).unwrap();
        assert!(v.unitarity_error() < 1e-12);
    }
}

#[test]
fn degenerate_block_comes_back_computational() {
    let eig = hermitian_eig(&ComplexMatrix::identity(3), &EigOptions::default()).unwrap();
    for (i, v) in eig.basis_vectors.iter().enumerate() {
        for (j, x) in v.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((x - c(want)).norm() < 1e-15);
        }
    }
}

#[test]
fn eigenbasis_phases_are_canonical() {
    // Diagonal unitary conjugation rephases the eigenvectors; the canonical
    // basis must absorb that phase into a real positive leading component.
    let mut rng = rng_from_seed(2);
    let h = random_hermitian(4, &mut rng);
    let phases: Vec<Complex64> = (0..4)
        .map(|k| Complex64::from_polar(1.0, 0.7 * k as f64))
        .collect();
    let d = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { phases[i] } else { c(0.0) });
    let a = hermitian_eig(&h, &EigOptions::default()).unwrap();
    let b = hermitian_eig(&h.conjugate_by(&d), &EigOptions::default()).unwrap();
    for (x, y) in a.basis_vectors.iter().zip(&b.basis_vectors) {
        let rotated: Vec<Complex64> = x.iter().zip(&phases).map(|(v, p)| v * p).collect();
        let overlap = quasift::qlinalg::inner(&rotated, y);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        for v in [x, y] {
            let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lead = v.iter().find(|z| (z.norm() - top).abs() < 1e-9).unwrap();
            assert!(lead.im.abs() < 1e-12 && lead.re > 0.0);
        }
    }
}

#[test]
fn pauli_exponential() {
    let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    for t in [0.3, 1.0, std::f64::consts::FRAC_PI_2] {
        let u = unitary_from_hermitian(&x, t).unwrap();
        let want = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(t.cos())
            } else {
                Complex64::new(0.0, -t.sin())
            }
        });
        assert!(u.max_abs_diff(&want) < 1e-14);
    }
}

#[test]
fn partial_trace_of_product_returns_factors() {
    let mut rng = rng_from_seed(17);
    let a = DensityMatrix::new(wishart_state(2, &mut rng), vec![2]).unwrap();
    let b = DensityMatrix::new(wishart_state(3, &mut rng), vec![3]).unwrap();
    let e = DensityMatrix::new(wishart_state(2, &mut rng), vec![2]).unwrap();
    let abe = a.tensor(&b).tensor(&e);
    assert_eq!(abe.subsystem_dims(), &[2, 3, 2]);
    assert!(
        abe.partial_trace(&[0])
            .unwrap()
            .matrix()
            .max_abs_diff(a.matrix())
            < 1e-14
    );
    assert!(
        abe.partial_trace(&[1])
            .unwrap()
            .matrix()
            .max_abs_diff(b.matrix())
            < 1e-14
    );
    assert!(
        abe.partial_trace(&[2])
            .unwrap()
            .matrix()
            .max_abs_diff(e.matrix())
            < 1e-14
    );
    let ae = a.tensor(&e);
    assert!(
        abe.partial_trace(&[0, 2])
            .unwrap()
            .matrix()
            .max_abs_diff(ae.matrix())
            < 1e-14
    );
    assert!(abe.mutual_information(&[0], &[1, 2]).unwrap().abs() < 1e-12);
    assert!(
        abe.conditional_mutual_information(&[0], &[2], &[1])
            .unwrap()
            .abs()
            < 1e-12
    );
}

#[test]
fn invalid_inputs_are_rejected() {
    let not_psd = ComplexMatrix::diagonal(&[1.5, -0.5]);
    assert!(DensityMatrix::new(not_psd, vec![2]).is_err());
    let wrong_trace = ComplexMatrix::diagonal(&[0.5, 0.4]);
    assert!(DensityMatrix::new(wrong_trace, vec![2]).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), vec![3]).is_err());
    let rho = bell();
    assert!(rho.mutual_information(&[0], &[0]).is_err());
    assert!(rho.partial_trace(&[2]).is_err());
    let skew = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(hermitian_eig(&skew, &EigOptions::default()).is_err());
}

#[test]
fn haar_unitaries_are_unitary() {
    let mut rng = rng_from_seed(4);
    for d in [2, 4, 6] {
        assert!(haar_unitary(d, &mut rng).unitarity_error() < 1e-12);
    }
}

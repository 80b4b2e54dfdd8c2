//! Circuits and closed forms of the three-qubit reference experiment.
//!
//! Register order of the full preparation circuits is
//! `(ancilla-1, ancilla-2, R, S, E, ancilla-3)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Circuit, Gate};
use crate::error::Result;
use crate::qlinalg::ComplexMatrix;

pub const REGISTERS: [&str; 6] = ["ancilla-1", "ancilla-2", "R", "S", "E", "ancilla-3"];
pub const QUBIT_R: usize = 2;
pub const QUBIT_S: usize = 3;
pub const QUBIT_E: usize = 4;

/// The real single-qubit gate `|0><1| - |1><0|` used in the interaction.
pub fn y_real() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).expect("2x2")
}

/// `|0><0|_S (x) 1_E + |1><1|_S (x) Y_E` on `S (x) E`.
pub fn u_se() -> ComplexMatrix {
    let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
    let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
    &p0.kron(&ComplexMatrix::identity(2)) + &p1.kron(&y_real())
}

/// Hermitian `G = -|1><1| (x) sigma_y` with `exp(-i pi/2 G) = U_SE`.
pub fn u_se_generator() -> ComplexMatrix {
    let sigma_y = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => Complex64::new(0.0, 0.0),
    });
    ComplexMatrix::diagonal(&[0.0, -1.0]).kron(&sigma_y)
}

/// The interaction as two native gates: CNOT then CZ, both controlled by `s`.
pub fn u_se_gates(s: usize, e: usize) -> [Gate; 2] {
    [
        Gate::Cnot {
            control: s,
            target: e,
        },
        Gate::Cz {
            control: s,
            target: e,
        },
    ]
}

/// Bell state `l` on `R (x) S`: `Phi+`, `Phi-`, `Psi+`, `Psi-` for `l = 0..4`.
///
/// This is the image of `|r s>` with `l = r + 2 s` under `H_R` then
/// `CNOT(R -> S)`, which is how the preparation circuit labels them.
pub fn bell_state(l: usize) -> Vec<Complex64> {
    let h = FRAC_1_SQRT_2;
    let v = match l {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        3 => [0.0, h, -h, 0.0],
        _ => panic!("Bell label {l} out of range"),
    };
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Label of the Bell state reached from computational input `|r s>`.
pub fn bell_label(r: usize, s: usize) -> usize {
    r + 2 * s
}

/// Weights of the Bell-diagonal state prepared with angles `theta1, theta2`.
pub fn bell_probabilities(theta1: f64, theta2: f64) -> [f64; 4] {
    let (s1, c1) = (theta1 / 2.0).sin_cos();
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    let (a0, a1) = (c1 * c1, s1 * s1);
    let (b0, b1) = (c2 * c2, s2 * s2);
    [a0 * b0, a1 * b0, a0 * b1, a1 * b1]
}

/// `(1 / (1 + e^-beta), 1 / (1 + e^beta))`.
pub fn thermal_populations(beta: f64) -> (f64, f64) {
    let logistic = |x: f64| {
        if x >= 0.0 {
            1.0 / (1.0 + (-x).exp())
        } else {
            let e = x.exp();
            e / (1.0 + e)
        }
    };
    (logistic(beta), logistic(-beta))
}

/// Rotation angle giving `cos^2(theta / 2) = 1 / (1 + e^-beta)`.
///
/// Equal to `2 arccos(sqrt(p0))`; written with `atan` so that large `beta`
/// keeps full precision.
pub fn thermal_angle(beta: f64) -> f64 {
    2.0 * (-beta / 2.0).exp().atan()
}

fn registers(names: &[&str]) -> Result<Circuit> {
    Circuit::with_registers(names.iter().map(|s| s.to_string()).collect())
}

fn push_bell_prep(c: &mut Circuit, offset: usize, theta1: f64, theta2: f64) -> Result<()> {
    let (a1, a2, r, s) = (offset, offset + 1, offset + 2, offset + 3);
    c.ry(a1, theta1)?.ry(a2, theta2)?;
    c.cnot(a1, r)?.cnot(a2, s)?;
    c.h(r)?.cnot(r, s)?;
    Ok(())
}

fn push_thermal_prep(c: &mut Circuit, e: usize, ancilla: usize, beta: f64) -> Result<()> {
    c.ry(e, thermal_angle(beta))?.cnot(e, ancilla)?;
    Ok(())
}

/// Four qubits `(ancilla-1, ancilla-2, R, S)`; tracing out the ancillas
/// leaves the Bell-diagonal state with weights [`bell_probabilities`].
pub fn build_bell_diagonal_prep(theta1: f64, theta2: f64) -> Result<Circuit> {
    let mut c = registers(&REGISTERS[..4])?;
    push_bell_prep(&mut c, 0, theta1, theta2)?;
    Ok(c)
}

/// Two qubits `(E, ancilla-3)`; `E` is left thermal at inverse temperature
/// `beta`.
pub fn build_thermal_prep(beta: f64) -> Result<Circuit> {
    let mut c = registers(&["E", "ancilla-3"])?;
    push_thermal_prep(&mut c, 0, 1, beta)?;
    Ok(c)
}

/// Six-qubit circuit preparing `rho_RS (x) rho_E` with purifying ancillas.
pub fn build_initial_state(theta1: f64, theta2: f64, beta: f64) -> Result<Circuit> {
    let mut c = registers(&REGISTERS)?;
    push_bell_prep(&mut c, 0, theta1, theta2)?;
    push_thermal_prep(&mut c, QUBIT_E, 5, beta)?;
    Ok(c)
}

/// The initial-state circuit followed by the interaction on `S, E`.
pub fn build_final_state(theta1: f64, theta2: f64, beta: f64) -> Result<Circuit> {
    let mut c = build_initial_state(theta1, theta2, beta)?;
    for gate in u_se_gates(QUBIT_S, QUBIT_E) {
        c.push(gate)?;
    }
    Ok(c)
}

/// Bell-basis measurement of `R, S` after the preparation: outcome bits
/// `(r, s)` identify Bell label [`bell_label`]`(r, s)`.
pub fn build_bell_measurement(theta1: f64, theta2: f64) -> Result<Circuit> {
    let mut c = build_bell_diagonal_prep(theta1, theta2)?;
    c.cnot(2, 3)?.h(2)?.measure(vec![2, 3])?;
    Ok(c)
}

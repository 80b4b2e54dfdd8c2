//! Interference-based measurement of transition amplitudes `<f|U|f'>`.
//!
//! An ancilla in `|+>` controls `U W` on a payload prepared in `|f> = V|0>`,
//! where `W|f> = |f'>`. A final `RY(theta)` (real part) or `RX(theta)`
//! (imaginary part) on the ancilla and `V^dagger` on the payload turn the
//! amplitude into the joint probabilities `P(0, f)` and `P(1, f)` of reading
//! the ancilla as 0 or 1 with the payload in `|0...0>`.

mod assembly;
mod families;
mod mitigation;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuits::{sample, simulate, Circuit, Gate, NoiseModel};
use crate::error::{Error, Result};
use crate::qlinalg::ComplexMatrix;
use crate::rng::derive_seed;

pub use assembly::{assemble_quasiprobability, AmplitudeTables, LabelAlignment};
pub use families::{
    estimate_table, exact_table, family_tasks, AmplitudeEntry, AmplitudeFamily, AmplitudeTable,
    TablePlan,
};
pub use mitigation::{select_mitigation_angle, Mitigation, MITIGATION_MIN_SIN};

/// Smallest `|sin theta|` the inversion accepts.
pub const MIN_SIN_THETA: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudePart {
    Real,
    Imag,
}

impl AmplitudePart {
    pub const BOTH: [AmplitudePart; 2] = [AmplitudePart::Real, AmplitudePart::Imag];

    fn of(self, a: Complex64) -> f64 {
        match self {
            AmplitudePart::Real => a.re,
            AmplitudePart::Imag => a.im,
        }
    }
}

/// Everything needed to measure one part of `<f|U|f'>`.
#[derive(Clone, Debug)]
pub struct AmplitudeTask {
    pub label: String,
    /// `U`, acting on the payload.
    pub unitary: ComplexMatrix,
    /// `V` with `V|0...0> = |f>`; its registers name the payload qubits.
    pub f_prep: Circuit,
    /// Preparation of `|f'>`; `None` measures the diagonal element.
    pub f_prime_prep: Option<Circuit>,
    pub theta: f64,
    pub part: AmplitudePart,
}

impl AmplitudeTask {
    pub fn new(
        label: impl Into<String>,
        unitary: ComplexMatrix,
        f_prep: Circuit,
        f_prime_prep: Option<Circuit>,
        theta: f64,
        part: AmplitudePart,
    ) -> Result<Self> {
        let k = f_prep.num_qubits();
        if unitary.rows() != 1 << k || !unitary.is_square() {
            return Err(Error::Shape(format!(
                "payload unitary must act on {k} qubits"
            )));
        }
        if !unitary.is_unitary(1e-10) {
            return Err(Error::NotUnitary(unitary.unitarity_error()));
        }
        if f_prep.has_measurements() {
            return Err(Error::Circuit("state preparation must not measure".into()));
        }
        if let Some(p) = &f_prime_prep {
            if p.num_qubits() != k || p.has_measurements() {
                return Err(Error::Circuit(
                    "f' preparation must be a measurement-free circuit on the payload".into(),
                ));
            }
        }
        Ok(Self {
            label: label.into(),
            unitary,
            f_prep,
            f_prime_prep,
            theta,
            part,
        })
    }

    pub fn payload_qubits(&self) -> usize {
        self.f_prep.num_qubits()
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn with_part(&self, part: AmplitudePart) -> Self {
        Self {
            part,
            ..self.clone()
        }
    }

    /// `W = V' V^dagger`, which maps `|f>` to `|f'>`.
    pub fn f_prime_map(&self) -> Result<ComplexMatrix> {
        match &self.f_prime_prep {
            Some(p) => Ok(p.unitary()?.matmul(&self.f_prep.unitary()?.adjoint())),
            None => Ok(ComplexMatrix::identity(1 << self.payload_qubits())),
        }
    }

    /// The controlled payload `U W`.
    fn payload(&self) -> Result<ComplexMatrix> {
        Ok(self.unitary.matmul(&self.f_prime_map()?))
    }

    /// `<f|U|f'>` by direct matrix algebra.
    pub fn exact_amplitude(&self) -> Result<Complex64> {
        let v = self.f_prep.unitary()?;
        let v_prime = match &self.f_prime_prep {
            Some(p) => p.unitary()?,
            None => v.clone(),
        };
        Ok(v.adjoint().matmul(&self.unitary).matmul(&v_prime).get(0, 0))
    }
}

fn payload_registers(task: &AmplitudeTask) -> Vec<String> {
    let mut names = vec!["interference".to_string()];
    names.extend(task.f_prep.registers().iter().cloned());
    names
}

/// Everything before the ancilla rotation: `V`, `H` and controlled `U W`.
fn interference_prefix(task: &AmplitudeTask) -> Result<Circuit> {
    let k = task.payload_qubits();
    let mut c = Circuit::with_registers(payload_registers(task))?;
    c.append(&task.f_prep, 1)?;
    c.h(0)?;
    c.controlled_u(vec![0], (1..=k).collect(), task.payload()?)?;
    Ok(c)
}

/// The ancilla rotation, `V^dagger` and the final measurement.
fn interference_suffix(task: &AmplitudeTask, c: &mut Circuit) -> Result<()> {
    match task.part {
        AmplitudePart::Real => c.ry(0, task.theta)?,
        AmplitudePart::Imag => c.rx(0, task.theta)?,
    };
    c.append(&task.f_prep.inverse()?, 1)?;
    c.measure_all()?;
    Ok(())
}

/// Ancilla qubit 0 plus the payload, measured in full.
pub fn build_interference_circuit(task: &AmplitudeTask) -> Result<Circuit> {
    let mut c = interference_prefix(task)?;
    interference_suffix(task, &mut c)?;
    Ok(c)
}

/// Prepares `|f'>`, applies `U`, undoes `V`: the all-zero outcome has
/// probability `|<f|U|f'>|^2`.
pub fn build_magnitude_circuit(task: &AmplitudeTask) -> Result<Circuit> {
    let mut c = Circuit::with_registers(task.f_prep.registers().to_vec())?;
    c.append(task.f_prime_prep.as_ref().unwrap_or(&task.f_prep), 0)?;
    c.push(Gate::unitary(
        (0..task.payload_qubits()).collect(),
        task.unitary.clone(),
        "U",
    ))?;
    c.append(&task.f_prep.inverse()?, 0)?;
    c.measure_all()?;
    Ok(c)
}

/// Outcome indices of `(ancilla = 0, payload = 0)` and `(1, 0)`.
fn outcome_indices(task: &AmplitudeTask) -> (usize, usize) {
    (0, 1 << task.payload_qubits())
}

/// `(P(0, f), P(1, f))` from the closed forms
/// `P0 = (cos^2(t/2) + sin^2(t/2)|a|^2 - sin t Re a) / 2` and
/// `P1 = (sin^2(t/2) + cos^2(t/2)|a|^2 + sin t Re a) / 2`, with `-Im a` in
/// place of `Re a` for the `RX` variant.
pub fn exact_interference_probabilities(task: &AmplitudeTask) -> Result<(f64, f64)> {
    let a = task.exact_amplitude()?;
    let x = match task.part {
        AmplitudePart::Real => a.re,
        AmplitudePart::Imag => -a.im,
    };
    let (s, c) = (task.theta / 2.0).sin_cos();
    let mag = a.norm_sqr();
    let p0 = 0.5 * (c * c + s * s * mag - task.theta.sin() * x);
    let p1 = 0.5 * (s * s + c * c * mag + task.theta.sin() * x);
    Ok((p0, p1))
}

/// `tan(t/2) P1 - cot(t/2) P0 + cot t`.
pub fn invert_amplitude(p0: f64, p1: f64, theta: f64) -> Result<f64> {
    if theta.sin().abs() <= MIN_SIN_THETA {
        return Err(Error::DegenerateAngle(theta));
    }
    let half = theta / 2.0;
    Ok(half.tan() * p1 - p0 / half.tan() + 1.0 / theta.tan())
}

/// Signed value of the requested part from the two probabilities.
fn invert_part(p0: f64, p1: f64, theta: f64, part: AmplitudePart) -> Result<f64> {
    let x = invert_amplitude(p0, p1, theta)?;
    Ok(match part {
        AmplitudePart::Real => x,
        AmplitudePart::Imag => -x,
    })
}

/// Delta-method variance of the inversion for multinomial frequencies.
fn inversion_variance(p0: f64, p1: f64, theta: f64, shots: u64) -> f64 {
    let a = (theta / 2.0).tan();
    let b = -1.0 / a;
    let n = shots as f64;
    (a * a * p1 * (1.0 - p1) + b * b * p0 * (1.0 - p0) - 2.0 * a * b * p0 * p1) / n
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEstimate {
    pub part: AmplitudePart,
    pub value: f64,
    pub variance: f64,
    /// Shots of the interference circuit; zero for exact evaluation.
    pub shots: u64,
    pub theta: f64,
    pub mitigated: bool,
    /// `|<f|U|f'>|^2` from the direct circuit.
    pub magnitude_sq: f64,
    pub p0: f64,
    pub p1: f64,
}

/// Noise-free evaluation through the inversion formula.
pub fn exact_estimate(task: &AmplitudeTask) -> Result<AmplitudeEstimate> {
    let (p0, p1) = exact_interference_probabilities(task)?;
    Ok(AmplitudeEstimate {
        part: task.part,
        value: invert_part(p0, p1, task.theta, task.part)?,
        variance: 0.0,
        shots: 0,
        theta: task.theta,
        mitigated: false,
        magnitude_sq: task.exact_amplitude()?.norm_sqr(),
        p0,
        p1,
    })
}

/// Samples the interference circuit and the direct circuit, each with
/// `shots` shots, and inverts the observed frequencies.
pub fn estimate_amplitude(
    task: &AmplitudeTask,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<AmplitudeEstimate> {
    if task.theta.sin().abs() <= MIN_SIN_THETA {
        return Err(Error::DegenerateAngle(task.theta));
    }
    let table = sample(
        &build_interference_circuit(task)?,
        shots,
        noise,
        derive_seed(seed, 0),
    )?;
    let (i0, i1) = outcome_indices(task);
    let (p0, p1) = (table.frequency(i0), table.frequency(i1));
    let direct = sample(
        &build_magnitude_circuit(task)?,
        shots,
        noise,
        derive_seed(seed, 1),
    )?;
    Ok(AmplitudeEstimate {
        part: task.part,
        value: invert_part(p0, p1, task.theta, task.part)?,
        variance: inversion_variance(p0, p1, task.theta, shots),
        shots,
        theta: task.theta,
        mitigated: false,
        magnitude_sq: direct.frequency(0),
        p0,
        p1,
    })
}

/// `(P(0, f), P(1, f))` read off an exact noiseless simulation of the
/// circuit; a cross-check of the closed forms.
pub fn simulated_interference_probabilities(task: &AmplitudeTask) -> Result<(f64, f64)> {
    let circuit = build_interference_circuit(task)?.without_measurements();
    let probs = simulate(&circuit)?.probabilities();
    let (i0, i1) = outcome_indices(task);
    Ok((probs[i0], probs[i1]))
}

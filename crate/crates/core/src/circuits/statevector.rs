use num_complex::Complex64;

use super::{bit, marginal_probabilities, Circuit, Gate};
use crate::error::{Error, Result};
use crate::qlinalg::{matrix::C0, ComplexMatrix, DensityMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![C0; 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::Shape(format!(
                "{} amplitudes for {num_qubits} qubits",
                amplitudes.len()
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        crate::qlinalg::norm(&self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Outcome distribution of measuring `qubits` (first listed is the most
    /// significant bit of the outcome index).
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        marginal_probabilities(&self.probabilities(), self.num_qubits, qubits)
    }

    /// Reduced state of `keep` (ascending register order).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let rho = DensityMatrix::pure(&self.amplitudes, vec![2; self.num_qubits])?;
        rho.partial_trace(keep)
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let Some(matrix) = gate.target_matrix() else {
            return Err(Error::Circuit(
                "measurement cannot be applied to a statevector".into(),
            ));
        };
        apply_controlled(
            &mut self.amplitudes,
            self.num_qubits,
            &gate.controls(),
            &gate.targets(),
            &matrix,
        );
        Ok(())
    }
}

/// Applies `matrix` on `targets` of an `n`-qubit vector, conditioned on every
/// control being `1`.
pub(crate) fn apply_controlled(
    amps: &mut [Complex64],
    n: usize,
    controls: &[usize],
    targets: &[usize],
    matrix: &ComplexMatrix,
) {
    let k = targets.len();
    let dim = 1usize << k;
    let control_mask: usize = controls.iter().map(|&q| 1 << (n - 1 - q)).sum();
    let target_mask: usize = targets.iter().map(|&q| 1 << (n - 1 - q)).sum();
    // Offsets of each target pattern, first target most significant.
    let offsets: Vec<usize> = (0..dim)
        .map(|pattern| {
            targets
                .iter()
                .enumerate()
                .filter(|&(j, _)| (pattern >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &q)| 1 << (n - 1 - q))
                .sum()
        })
        .collect();
    let mut gathered = vec![C0; dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & control_mask != control_mask {
            continue;
        }
        for (slot, &off) in gathered.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let mut acc = C0;
            for (col, g) in gathered.iter().enumerate() {
                acc += matrix.get(row, col) * g;
            }
            amps[base | off] = acc;
        }
    }
}

/// Exact statevector of a measurement-free circuit started from `|0...0>`.
pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    if circuit.has_measurements() {
        return Err(Error::Circuit(
            "exact simulation needs a circuit without measurements".into(),
        ));
    }
    let mut state = StateVector::zero(circuit.num_qubits());
    for gate in circuit.gates() {
        state.apply(gate)?;
    }
    Ok(state)
}

/// Applies a Pauli string (base-4 digits, first qubit most significant,
/// `0..=3` for `I, X, Y, Z`) to `qubits`.
pub(crate) fn apply_pauli_string(amps: &mut [Complex64], n: usize, qubits: &[usize], code: usize) {
    let k = qubits.len();
    for (j, &q) in qubits.iter().enumerate() {
        let digit = (code >> (2 * (k - 1 - j))) & 3;
        if digit == 0 {
            continue;
        }
        let shift = n - 1 - q;
        let mask = 1usize << shift;
        match digit {
            1 => {
                for i in 0..amps.len() {
                    if i & mask == 0 {
                        amps.swap(i, i | mask);
                    }
                }
            }
            2 => {
                let plus_i = Complex64::new(0.0, 1.0);
                for i in 0..amps.len() {
                    if i & mask == 0 {
                        let (a0, a1) = (amps[i], amps[i | mask]);
                        amps[i] = -plus_i * a1;
                        amps[i | mask] = plus_i * a0;
                    }
                }
            }
            _ => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if bit(i, q, n) == 1 {
                        *a = -*a;
                    }
                }
            }
        }
    }
}

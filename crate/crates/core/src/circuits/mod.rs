//! Gate-level simulation: exact statevectors, noisy density matrices and
//! shot sampling, plus the concrete circuits of the reference experiment.
//!
//! Qubit 0 is the most significant bit of a basis index, so the statevector
//! of an `n`-qubit register is the Kronecker product of its qubits in
//! register order. Bitstrings are printed the same way, leftmost = qubit 0.

mod density_sim;
pub mod experiment;
mod gate;
mod noise;
mod sampling;
mod statevector;

use serde::{Deserialize, Serialize};

pub(crate) use density_sim::measured_distribution;
pub use density_sim::{noisy_probabilities, simulate_density, DensityState};
pub use gate::{hadamard, pauli, rx_matrix, ry_matrix, Gate};
pub use noise::{NoiseModel, ReadoutError};
pub use sampling::{sample, ShotTable};
pub use statevector::{simulate, StateVector};

use crate::error::{Error, Result};
use crate::qlinalg::ComplexMatrix;

/// Largest register the simulators accept.
pub const MAX_QUBITS: usize = 12;

/// Ordered gate list over named single-qubit registers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    registers: Vec<String>,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Empty circuit with registers named `q0, q1, ...`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        let names = (0..num_qubits).map(|q| format!("q{q}")).collect();
        Self::with_registers(names)
    }

    pub fn with_registers(names: Vec<String>) -> Result<Self> {
        if names.is_empty() || names.len() > MAX_QUBITS {
            return Err(Error::Circuit(format!(
                "register count {} outside 1..={MAX_QUBITS}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::Circuit(format!("duplicate register name {name:?}")));
            }
        }
        Ok(Self {
            num_qubits: names.len(),
            registers: names,
            gates: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Index of the register called `name`.
    pub fn qubit(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r == name)
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        if !gate.is_measurement() && self.gates.iter().any(Gate::is_measurement) {
            return Err(Error::Circuit(
                "gates after a measurement are not supported".into(),
            ));
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn ry(&mut self, target: usize, theta: f64) -> Result<&mut Self> {
        self.push(Gate::Ry { target, theta })
    }

    pub fn rx(&mut self, target: usize, theta: f64) -> Result<&mut Self> {
        self.push(Gate::Rx { target, theta })
    }

    pub fn h(&mut self, target: usize) -> Result<&mut Self> {
        self.push(Gate::H { target })
    }

    pub fn x(&mut self, target: usize) -> Result<&mut Self> {
        self.push(Gate::X { target })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Gate::Cnot { control, target })
    }

    pub fn cz(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Gate::Cz { control, target })
    }

    pub fn controlled_u(
        &mut self,
        controls: Vec<usize>,
        targets: Vec<usize>,
        matrix: ComplexMatrix,
    ) -> Result<&mut Self> {
        self.push(Gate::controlled_u(controls, targets, matrix))
    }

    pub fn measure(&mut self, targets: Vec<usize>) -> Result<&mut Self> {
        self.push(Gate::Measure { targets })
    }

    pub fn measure_all(&mut self) -> Result<&mut Self> {
        self.measure((0..self.num_qubits).collect())
    }

    /// Appends every gate of `other`, with qubit `q` of `other` mapped to
    /// `q + offset` here.
    pub fn append(&mut self, other: &Circuit, offset: usize) -> Result<&mut Self> {
        if other.num_qubits + offset > self.num_qubits {
            return Err(Error::Circuit(format!(
                "cannot place a {}-qubit circuit at offset {offset} in {} qubits",
                other.num_qubits, self.num_qubits
            )));
        }
        for gate in &other.gates {
            self.push(gate.shifted(offset))?;
        }
        Ok(self)
    }

    /// Adjoint circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Result<Self> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            gates,
        })
    }

    /// Copy without measurement gates.
    pub fn without_measurements(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            gates: self
                .gates
                .iter()
                .filter(|g| !g.is_measurement())
                .cloned()
                .collect(),
        }
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(Gate::is_measurement)
    }

    /// Measured qubits in ascending register order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut qubits: Vec<usize> = self
            .gates
            .iter()
            .filter(|g| g.is_measurement())
            .flat_map(Gate::targets)
            .collect();
        qubits.sort_unstable();
        qubits.dedup();
        qubits
    }

    /// Full `2^n x 2^n` unitary of the measurement-free part.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.num_qubits;
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut state = StateVector::basis(self.num_qubits, j);
            for gate in self.gates.iter().filter(|g| !g.is_measurement()) {
                state.apply(gate)?;
            }
            columns.push(state.into_amplitudes());
        }
        ComplexMatrix::from_columns(&columns)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Circuit = serde_json::from_str(text)?;
        let mut c = Circuit::with_registers(raw.registers)?;
        for gate in raw.gates {
            c.push(gate)?;
        }
        Ok(c)
    }
}

/// Bit of qubit `q` in basis index `index` of an `n`-qubit register.
#[inline]
pub(crate) fn bit(index: usize, q: usize, n: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Bitstring of `index` over `width` bits, most significant first.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width)
        .map(|k| if bit(index, k, width) == 1 { '1' } else { '0' })
        .collect()
}

/// Marginal distribution of `probs` (over `n` qubits) on `qubits`, indexed
/// with the first listed qubit most significant.
pub fn marginal_probabilities(probs: &[f64], n: usize, qubits: &[usize]) -> Vec<f64> {
    let m = qubits.len();
    let mut out = vec![0.0; 1 << m];
    for (index, &p) in probs.iter().enumerate() {
        let mut key = 0;
        for &q in qubits {
            key = (key << 1) | bit(index, q, n);
        }
        out[key] += p;
    }
    out
}

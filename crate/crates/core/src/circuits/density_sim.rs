use num_complex::Complex64;

use super::statevector::apply_controlled;
use super::{marginal_probabilities, Circuit, Gate, NoiseModel};
use crate::error::{Error, Result};
use crate::qlinalg::{matrix::C0, ComplexMatrix};

/// Mixed state of a qubit register evolving under gates with depolarizing
/// noise. Used for exact noisy outcome probabilities.
#[derive(Clone, Debug)]
pub struct DensityState {
    num_qubits: usize,
    rho: Vec<Complex64>,
}

impl DensityState {
    pub fn zero(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut rho = vec![C0; dim * dim];
        rho[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, rho }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.dim(), self.dim(), self.rho.clone()).expect("square state")
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.rho[i * d + i].re.max(0.0)).collect()
    }

    /// Applies `gate` followed by its depolarizing error.
    pub fn apply(&mut self, gate: &Gate, noise: &NoiseModel) -> Result<()> {
        let Some(matrix) = gate.target_matrix() else {
            return Err(Error::Circuit(
                "measurement inside density evolution".into(),
            ));
        };
        let controls = gate.controls();
        let targets = gate.targets();
        let n = self.num_qubits;
        let d = self.dim();
        let mut buf = vec![C0; d];
        // rho -> G rho, column by column.
        for j in 0..d {
            for i in 0..d {
                buf[i] = self.rho[i * d + j];
            }
            apply_controlled(&mut buf, n, &controls, &targets, &matrix);
            for i in 0..d {
                self.rho[i * d + j] = buf[i];
            }
        }
        // rho -> rho G^dagger, row by row: r G^dagger = conj(G conj(r)).
        for i in 0..d {
            for j in 0..d {
                buf[j] = self.rho[i * d + j].conj();
            }
            apply_controlled(&mut buf, n, &controls, &targets, &matrix);
            for j in 0..d {
                self.rho[i * d + j] = buf[j].conj();
            }
        }
        let p = noise.gate_error(gate);
        if p > 0.0 {
            self.depolarize(&gate.qubits(), p);
        }
        Ok(())
    }

    /// `rho -> (1 - p) rho + p / (4^k - 1) * sum_{P != I} P rho P` on `qubits`.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) {
        let n = self.num_qubits;
        let d = self.dim();
        let k = qubits.len();
        let mask: usize = qubits.iter().map(|&q| 1 << (n - 1 - q)).sum();
        let patterns: Vec<usize> = (0..1usize << k)
            .map(|pat| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| (pat >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &q)| 1 << (n - 1 - q))
                    .sum()
            })
            .collect();
        // Twirl: (1/4^k) sum_P P rho P = Tr_Q(rho) (x) I / 2^k.
        let norm = 1.0 / (1usize << k) as f64;
        let mut twirl = vec![C0; d * d];
        for i in 0..d {
            for j in 0..d {
                if i & mask != j & mask {
                    continue;
                }
                let (bi, bj) = (i & !mask, j & !mask);
                let mut acc = C0;
                for &off in &patterns {
                    acc += self.rho[(bi | off) * d + (bj | off)];
                }
                twirl[i * d + j] = acc * norm;
            }
        }
        let four_k = (1usize << (2 * k)) as f64;
        let w = p / (four_k - 1.0);
        for (r, t) in self.rho.iter_mut().zip(&twirl) {
            *r = *r * (1.0 - p) + (t * four_k - *r) * w;
        }
    }
}

/// Runs the unitary part of `circuit` on `|0...0><0...0|` with gate noise.
pub fn simulate_density(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityState> {
    let mut state = DensityState::zero(circuit.num_qubits());
    for gate in circuit.gates().iter().filter(|g| !g.is_measurement()) {
        state.apply(gate, noise)?;
    }
    Ok(state)
}

/// Exact outcome distribution over the measured qubits (all qubits if the
/// circuit has no measurement), including gate and readout noise.
pub fn noisy_probabilities(circuit: &Circuit, noise: &NoiseModel) -> Result<Vec<f64>> {
    let state = simulate_density(circuit, noise)?;
    Ok(measured_distribution(&state, circuit, noise))
}

pub(crate) fn measured_distribution(
    state: &DensityState,
    circuit: &Circuit,
    noise: &NoiseModel,
) -> Vec<f64> {
    let qubits = if circuit.has_measurements() {
        circuit.measured_qubits()
    } else {
        (0..circuit.num_qubits()).collect()
    };
    let probs = marginal_probabilities(&state.probabilities(), state.num_qubits, &qubits);
    noise.confuse(&probs, &qubits)
}

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::statevector::apply_pauli_string;
use super::{bitstring, Circuit, NoiseModel, StateVector};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Outcome counts of a sampled circuit over its measured qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotTable {
    /// Measured qubits, in bitstring order.
    pub qubits: Vec<usize>,
    /// Dense counts indexed by outcome, first measured qubit most significant.
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotTable {
    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn count(&self, outcome: usize) -> u64 {
        self.counts[outcome]
    }

    pub fn frequency(&self, outcome: usize) -> f64 {
        self.counts[outcome] as f64 / self.shots as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.frequency(i)).collect()
    }

    pub fn count_of(&self, bits: &str) -> Option<u64> {
        if bits.len() != self.width() {
            return None;
        }
        let index = usize::from_str_radix(bits, 2).ok()?;
        Some(self.counts[index])
    }

    /// Nonzero entries as `(bitstring, count)` in outcome order.
    pub fn nonzero(&self) -> Vec<(String, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (bitstring(i, self.width()), c))
            .collect()
    }

    /// CSV with header `bitstring,count`, nonzero outcomes only.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bitstring", "count"])?;
        for (bits, count) in self.nonzero() {
            w.write_record([bits, count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws `shots` outcomes of the measured qubits of `circuit`.
///
/// Gate noise uses the trajectory method: each shot draws its own Pauli
/// error pattern, shots with the same pattern share one statevector run, and
/// each readout bit is flipped independently per shot. With no noise (or an
/// ideal model) a single run is sampled, consuming the generator identically.
pub fn sample(
    circuit: &Circuit,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<ShotTable> {
    let qubits = circuit.measured_qubits();
    if qubits.is_empty() {
        return Err(Error::Circuit(
            "sampling needs at least one measured qubit".into(),
        ));
    }
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let ideal = NoiseModel::ideal();
    let noise = noise.unwrap_or(&ideal);
    noise.validate()?;
    let mut rng = rng_from_seed(seed);
    let unitary_gates: Vec<_> = circuit
        .gates()
        .iter()
        .filter(|g| !g.is_measurement())
        .collect();
    let error_probs: Vec<f64> = unitary_gates.iter().map(|g| noise.gate_error(g)).collect();

    // Error pattern per shot: (gate position, Pauli string code).
    let mut patterns: BTreeMap<Vec<(usize, usize)>, u64> = BTreeMap::new();
    if error_probs.iter().any(|&p| p > 0.0) {
        for _ in 0..shots {
            let mut pattern = Vec::new();
            for (i, &p) in error_probs.iter().enumerate() {
                if p > 0.0 && rng.random::<f64>() < p {
                    let k = unitary_gates[i].qubits().len();
                    pattern.push((i, rng.random_range(1..1usize << (2 * k))));
                }
            }
            *patterns.entry(pattern).or_insert(0) += 1;
        }
    } else {
        patterns.insert(Vec::new(), shots);
    }

    let mut counts = vec![0u64; 1 << qubits.len()];
    for (pattern, n) in &patterns {
        let mut state = StateVector::zero(circuit.num_qubits());
        let mut errors = pattern.iter().peekable();
        for (i, gate) in unitary_gates.iter().enumerate() {
            state.apply(gate)?;
            while let Some(&&(pos, code)) = errors.peek() {
                if pos != i {
                    break;
                }
                let mut amps = state.into_amplitudes();
                apply_pauli_string(&mut amps, circuit.num_qubits(), &gate.qubits(), code);
                state = StateVector::from_amplitudes(circuit.num_qubits(), amps)?;
                errors.next();
            }
        }
        let probs = state.marginal_probabilities(&qubits);
        for (slot, k) in counts.iter_mut().zip(multinomial(*n, &probs, &mut rng)) {
            *slot += k;
        }
    }

    if noise.has_readout_errors() {
        counts = flip_readout(&counts, &qubits, noise, &mut rng);
    }
    Ok(ShotTable {
        qubits,
        counts,
        shots,
        seed,
    })
}

/// Multinomial draw via sequential conditional binomials.
fn multinomial(n: u64, probs: &[f64], rng: &mut SimRng) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            out[i] = remaining;
            break;
        }
        let p = p.max(0.0);
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("valid binomial")
                .sample(rng)
        };
        out[i] = k;
        remaining -= k;
        mass -= p;
    }
    out
}

fn flip_readout(
    counts: &[u64],
    qubits: &[usize],
    noise: &NoiseModel,
    rng: &mut SimRng,
) -> Vec<u64> {
    let m = qubits.len();
    let errors: Vec<_> = qubits.iter().map(|&q| noise.readout_for(q)).collect();
    let mut out = vec![0u64; counts.len()];
    for (outcome, &k) in counts.iter().enumerate() {
        for _ in 0..k {
            let mut read = outcome;
            for (j, e) in errors.iter().enumerate() {
                let mask = 1usize << (m - 1 - j);
                let p = if outcome & mask == 0 { e.p01 } else { e.p10 };
                if p > 0.0 && rng.random::<f64>() < p {
                    read ^= mask;
                }
            }
            out[read] += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::ReadoutError;

    fn plus_state() -> Circuit {
        let mut c = Circuit::new(1).unwrap();
        c.h(0).unwrap().measure_all().unwrap();
        c
    }

    #[test]
    fn counts_sum_to_shots_and_are_reproducible() {
        let c = plus_state();
        let a = sample(&c, 8192, None, 11).unwrap();
        let b = sample(&c, 8192, None, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 8192);
        let sigma = (0.25f64 / 8192.0).sqrt();
        assert!((a.frequency(0) - 0.5).abs() < 4.0 * sigma);
    }

    #[test]
    fn ideal_model_matches_noiseless_bit_for_bit() {
        let mut c = Circuit::new(3).unwrap();
        c.ry(0, 1.1)
            .unwrap()
            .cnot(0, 1)
            .unwrap()
            .h(2)
            .unwrap()
            .measure_all()
            .unwrap();
        let a = sample(&c, 4096, None, 5).unwrap();
        let b = sample(&c, 4096, Some(&NoiseModel::ideal()), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn readout_flip_rate() {
        let mut c = Circuit::new(1).unwrap();
        c.measure_all().unwrap();
        let noise = NoiseModel::new(
            0.0,
            0.0,
            ReadoutError {
                p01: 0.02,
                p10: 0.0,
            },
        )
        .unwrap();
        let t = sample(&c, 65536, Some(&noise), 3).unwrap();
        let sigma = (0.02f64 * 0.98 / 65536.0).sqrt();
        assert!((t.frequency(1) - 0.02).abs() < 4.0 * sigma);
    }

    #[test]
    fn partial_measurement_and_csv() {
        let mut c = Circuit::new(2).unwrap();
        c.x(1).unwrap().measure(vec![1]).unwrap();
        let t = sample(&c, 10, None, 0).unwrap();
        assert_eq!(t.count_of("1"), Some(10));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "bitstring,count\n1,10\n");
    }

    #[test]
    fn multinomial_is_exhaustive() {
        let mut rng = rng_from_seed(1);
        let k = multinomial(1000, &[0.2, 0.0, 0.5, 0.3], &mut rng);
        assert_eq!(k.iter().sum::<u64>(), 1000);
        assert_eq!(k[1], 0);
    }
}

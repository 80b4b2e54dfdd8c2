use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Gate;
use crate::error::{Error, Result};

/// Classical bit-flip probabilities at readout.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// Probability of reading `1` when the qubit is `0`.
    pub p01: f64,
    /// Probability of reading `0` when the qubit is `1`.
    pub p10: f64,
}

impl ReadoutError {
    pub fn symmetric(p: f64) -> Self {
        Self { p01: p, p10: p }
    }

    pub fn is_zero(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }
}

/// Depolarizing gate errors plus readout flips.
///
/// After a gate on `k` qubits, with probability `p1` (`k = 1`) or `p2`
/// (`k >= 2`) one of the `4^k - 1` non-identity Pauli strings on those qubits
/// is applied, chosen uniformly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    #[serde(default)]
    pub readout: ReadoutError,
    /// Per-qubit readout errors replacing `readout`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub readout_overrides: BTreeMap<usize, ReadoutError>,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn new(p1: f64, p2: f64, readout: ReadoutError) -> Result<Self> {
        let model = Self {
            p1,
            p2,
            readout,
            readout_overrides: BTreeMap::new(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = vec![("p1", self.p1), ("p2", self.p2)];
        all.push(("readout p01", self.readout.p01));
        all.push(("readout p10", self.readout.p10));
        for r in self.readout_overrides.values() {
            all.push(("readout override p01", r.p01));
            all.push(("readout override p10", r.p10));
        }
        for (name, p) in all {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn readout_for(&self, qubit: usize) -> ReadoutError {
        self.readout_overrides
            .get(&qubit)
            .copied()
            .unwrap_or(self.readout)
    }

    /// Depolarizing probability attached to `gate`.
    pub fn gate_error(&self, gate: &Gate) -> f64 {
        match gate.qubits().len() {
            0 => 0.0,
            _ if gate.is_measurement() => 0.0,
            1 => self.p1,
            _ => self.p2,
        }
    }

    pub fn has_gate_errors(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }

    pub fn has_readout_errors(&self) -> bool {
        !self.readout.is_zero() || self.readout_overrides.values().any(|r| !r.is_zero())
    }

    pub fn is_ideal(&self) -> bool {
        !self.has_gate_errors() && !self.has_readout_errors()
    }

    /// Applies readout confusion to a distribution over `qubits` (first
    /// listed is the most significant outcome bit).
    pub fn confuse(&self, probs: &[f64], qubits: &[usize]) -> Vec<f64> {
        let m = qubits.len();
        let mut current = probs.to_vec();
        for (j, &q) in qubits.iter().enumerate() {
            let r = self.readout_for(q);
            if r.is_zero() {
                continue;
            }
            let mask = 1usize << (m - 1 - j);
            let mut next = vec![0.0; current.len()];
            for (i, &p) in current.iter().enumerate() {
                if i & mask == 0 {
                    next[i] += p * (1.0 - r.p01);
                    next[i | mask] += p * r.p01;
                } else {
                    next[i] += p * (1.0 - r.p10);
                    next[i & !mask] += p * r.p10;
                }
            }
            current = next;
        }
        current
    }
}

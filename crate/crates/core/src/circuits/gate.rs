use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlinalg::ComplexMatrix;

const TOL_UNITARY: f64 = 1e-10;

/// One circuit instruction. Qubit indices refer to register positions.
///
/// `RY(theta) = [[cos t, -sin t], [sin t, cos t]]` and
/// `RX(theta) = [[cos t, -i sin t], [-i sin t, cos t]]` with `t = theta / 2`;
/// `Y` is the Pauli matrix `[[0, -i], [i, 0]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    Ry {
        target: usize,
        theta: f64,
    },
    Rx {
        target: usize,
        theta: f64,
    },
    H {
        target: usize,
    },
    X {
        target: usize,
    },
    Y {
        target: usize,
    },
    Z {
        target: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Cz {
        control: usize,
        target: usize,
    },
    /// Arbitrary unitary on `targets` (first target is the most significant
    /// index of `matrix`), applied when every qubit in `controls` is `|1>`.
    ControlledU {
        controls: Vec<usize>,
        targets: Vec<usize>,
        matrix: ComplexMatrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Measure {
        targets: Vec<usize>,
    },
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ry_matrix(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real(2, 2, &[co, -s, s, co]).expect("2x2")
}

pub fn rx_matrix(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::new(2, 2, vec![c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]).expect("2x2")
}

pub fn hadamard() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
}

pub fn pauli(index: usize) -> ComplexMatrix {
    match index {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2"),
        2 => ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        )
        .expect("2x2"),
        3 => ComplexMatrix::diagonal(&[1.0, -1.0]),
        _ => panic!("pauli index {index} out of range"),
    }
}

impl Gate {
    pub fn controlled_u(controls: Vec<usize>, targets: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Gate::ControlledU {
            controls,
            targets,
            matrix,
            label: None,
        }
    }

    /// Plain (uncontrolled) multi-qubit unitary.
    pub fn unitary(targets: Vec<usize>, matrix: ComplexMatrix, label: impl Into<String>) -> Self {
        Gate::ControlledU {
            controls: Vec::new(),
            targets,
            matrix,
            label: Some(label.into()),
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::Measure { .. })
    }

    pub fn controls(&self) -> Vec<usize> {
        match self {
            Gate::Cnot { control, .. } | Gate::Cz { control, .. } => vec![*control],
            Gate::ControlledU { controls, .. } => controls.clone(),
            _ => Vec::new(),
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::Ry { target, .. }
            | Gate::Rx { target, .. }
            | Gate::H { target }
            | Gate::X { target }
            | Gate::Y { target }
            | Gate::Z { target }
            | Gate::Cnot { target, .. }
            | Gate::Cz { target, .. } => vec![*target],
            Gate::ControlledU { targets, .. } | Gate::Measure { targets } => targets.clone(),
        }
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q = self.controls();
        q.extend(self.targets());
        q
    }

    /// The operator applied to the targets when the controls are satisfied.
    pub fn target_matrix(&self) -> Option<ComplexMatrix> {
        Some(match self {
            Gate::Ry { theta, .. } => ry_matrix(*theta),
            Gate::Rx { theta, .. } => rx_matrix(*theta),
            Gate::H { .. } => hadamard(),
            Gate::X { .. } | Gate::Cnot { .. } => pauli(1),
            Gate::Y { .. } => pauli(2),
            Gate::Z { .. } | Gate::Cz { .. } => pauli(3),
            Gate::ControlledU { matrix, .. } => matrix.clone(),
            Gate::Measure { .. } => return None,
        })
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        if qubits.is_empty() {
            return Err(Error::Circuit("gate acts on no qubits".into()));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::Circuit(format!(
                    "qubit {q} out of range for {num_qubits} qubits"
                )));
            }
            if qubits[..i].contains(&q) {
                return Err(Error::Circuit(format!("qubit {q} used twice in one gate")));
            }
        }
        if let Gate::ControlledU {
            targets, matrix, ..
        } = self
        {
            let dim = 1usize << targets.len();
            if matrix.rows() != dim || matrix.cols() != dim {
                return Err(Error::Circuit(format!(
                    "{}x{} payload on {} targets",
                    matrix.rows(),
                    matrix.cols(),
                    targets.len()
                )));
            }
            let err = matrix.unitarity_error();
            if err > TOL_UNITARY {
                return Err(Error::NotUnitary(err));
            }
        }
        if let Gate::Ry { theta, .. } | Gate::Rx { theta, .. } = self {
            if !theta.is_finite() {
                return Err(Error::Circuit("non-finite rotation angle".into()));
            }
        }
        Ok(())
    }

    /// Inverse gate. Measurements have no inverse.
    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            Gate::Ry { target, theta } => Gate::Ry {
                target: *target,
                theta: -theta,
            },
            Gate::Rx { target, theta } => Gate::Rx {
                target: *target,
                theta: -theta,
            },
            Gate::ControlledU {
                controls,
                targets,
                matrix,
                label,
            } => Gate::ControlledU {
                controls: controls.clone(),
                targets: targets.clone(),
                matrix: matrix.adjoint(),
                label: label.as_ref().map(|l| format!("{l}^dagger")),
            },
            Gate::Measure { .. } => {
                return Err(Error::Circuit("measurement has no inverse".into()));
            }
            self_inverse => self_inverse.clone(),
        })
    }

    /// Same gate with every qubit index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let s = |q: &usize| q + offset;
        match self {
            Gate::Ry { target, theta } => Gate::Ry {
                target: s(target),
                theta: *theta,
            },
            Gate::Rx { target, theta } => Gate::Rx {
                target: s(target),
                theta: *theta,
            },
            Gate::H { target } => Gate::H { target: s(target) },
            Gate::X { target } => Gate::X { target: s(target) },
            Gate::Y { target } => Gate::Y { target: s(target) },
            Gate::Z { target } => Gate::Z { target: s(target) },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: s(control),
                target: s(target),
            },
            Gate::Cz { control, target } => Gate::Cz {
                control: s(control),
                target: s(target),
            },
            Gate::ControlledU {
                controls,
                targets,
                matrix,
                label,
            } => Gate::ControlledU {
                controls: controls.iter().map(s).collect(),
                targets: targets.iter().map(s).collect(),
                matrix: matrix.clone(),
                label: label.clone(),
            },
            Gate::Measure { targets } => Gate::Measure {
                targets: targets.iter().map(s).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_inverses() {
        let g = Gate::Ry {
            target: 0,
            theta: 0.4,
        };
        let m = g.target_matrix().unwrap();
        let mi = g.inverse().unwrap().target_matrix().unwrap();
        assert!(m.matmul(&mi).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let g = Gate::Rx {
            target: 0,
            theta: 1.3,
        };
        assert!(g.target_matrix().unwrap().is_unitary(1e-14));
    }

    #[test]
    fn validation_catches_bad_indices_and_payloads() {
        assert!(Gate::Cnot {
            control: 1,
            target: 1
        }
        .validate(2)
        .is_err());
        assert!(Gate::H { target: 3 }.validate(2).is_err());
        let bad = Gate::controlled_u(vec![0], vec![1], ComplexMatrix::identity(4));
        assert!(bad.validate(3).is_err());
        let non_unitary =
            Gate::controlled_u(vec![0], vec![1], ComplexMatrix::diagonal(&[1.0, 2.0]));
        assert!(matches!(non_unitary.validate(2), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn gate_json_is_tagged() {
        let g = Gate::Cnot {
            control: 0,
            target: 2,
        };
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"gate":"cnot","control":0,"target":2}"#);
        let back: Gate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}

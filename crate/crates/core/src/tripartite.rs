//! The reference / system / environment model.
//!
//! Tensor order is `(R, S, E)` everywhere. The interaction acts on `S ⊗ E`
//! and is embedded as `1_R ⊗ U_SE`; the initial joint state is the product
//! `rho_RS ⊗ rho_E`.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::experiment::{bell_probabilities, bell_state, thermal_populations, u_se};
use crate::error::{Error, Result};
use crate::qlinalg::{random, ComplexMatrix, DensityMatrix, EigOptions, SpectralDecomposition};

pub const R: usize = 0;
pub const S: usize = 1;
pub const E: usize = 2;

const TOL_UNITARY: f64 = 1e-10;
const TOL_R_SPECTRUM: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct TripartiteSetup {
    rho_rs: DensityMatrix,
    rho_e: DensityMatrix,
    u_se: ComplexMatrix,
    dims: (usize, usize, usize),
    pub label: String,
}

impl TripartiteSetup {
    pub fn new(
        rho_rs: DensityMatrix,
        rho_e: DensityMatrix,
        u_se: ComplexMatrix,
        dims: (usize, usize, usize),
        label: impl Into<String>,
    ) -> Result<Self> {
        let (dr, ds, de) = dims;
        if rho_rs.dim() != dr * ds {
            return Err(Error::Shape(format!(
                "rho_RS has dimension {} but d_R * d_S = {}",
                rho_rs.dim(),
                dr * ds
            )));
        }
        if rho_e.dim() != de {
            return Err(Error::Shape(format!(
                "rho_E has dimension {} but d_E = {de}",
                rho_e.dim()
            )));
        }
        if u_se.rows() != ds * de || !u_se.is_square() {
            return Err(Error::Shape(format!("U must be {0}x{0} on S ⊗ E", ds * de)));
        }
        let err = u_se.unitarity_error();
        if err > TOL_UNITARY {
            return Err(Error::NotUnitary(err));
        }
        let rho_rs = DensityMatrix::new(rho_rs.matrix().clone(), vec![dr, ds])?;
        let rho_e = DensityMatrix::new(rho_e.matrix().clone(), vec![de])?;
        Ok(Self {
            rho_rs,
            rho_e,
            u_se,
            dims,
            label: label.into(),
        })
    }

    pub fn rho_rs(&self) -> &DensityMatrix {
        &self.rho_rs
    }

    pub fn rho_e(&self) -> &DensityMatrix {
        &self.rho_e
    }

    pub fn u_se(&self) -> &ComplexMatrix {
        &self.u_se
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    /// `1_R ⊗ U_SE`
    pub fn full_unitary(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dims.0).kron(&self.u_se)
    }

    /// `rho_RS ⊗ rho_E`
    pub fn initial_state(&self) -> DensityMatrix {
        self.rho_rs.tensor(&self.rho_e)
    }

    /// Same states with the interaction replaced.
    pub fn with_unitary(&self, u_se: ComplexMatrix) -> Result<Self> {
        Self::new(
            self.rho_rs.clone(),
            self.rho_e.clone(),
            u_se,
            self.dims,
            self.label.clone(),
        )
    }

    pub fn to_file(&self) -> SetupFile {
        SetupFile {
            dims: [self.dims.0, self.dims.1, self.dims.2],
            rho_rs: pairs(self.rho_rs.matrix()),
            rho_e: pairs(self.rho_e.matrix()),
            u: pairs(&self.u_se),
            label: self.label.clone(),
        }
    }

    pub fn from_file(file: &SetupFile) -> Result<Self> {
        let [dr, ds, de] = file.dims;
        let rho_rs = from_pairs(dr * ds, &file.rho_rs, "rho_RS")?;
        let rho_e = from_pairs(de, &file.rho_e, "rho_E")?;
        let u = from_pairs(ds * de, &file.u, "U")?;
        Self::new(
            DensityMatrix::new(rho_rs, vec![dr, ds])?,
            DensityMatrix::new(rho_e, vec![de])?,
            u,
            (dr, ds, de),
            file.label.clone(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: SetupFile = serde_json::from_str(&text)?;
        Self::from_file(&file)
    }
}

/// JSON form of a setup. Matrices are row-major lists of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SetupFile {
    pub dims: [usize; 3],
    #[serde(rename = "rho_RS")]
    pub rho_rs: Vec<[f64; 2]>,
    #[serde(rename = "rho_E")]
    pub rho_e: Vec<[f64; 2]>,
    #[serde(rename = "U")]
    pub u: Vec<[f64; 2]>,
    #[serde(default)]
    pub label: String,
}

fn pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(dim: usize, data: &[[f64; 2]], name: &str) -> Result<ComplexMatrix> {
    if data.len() != dim * dim {
        return Err(Error::Shape(format!(
            "{name} has {} entries, expected {}",
            data.len(),
            dim * dim
        )));
    }
    ComplexMatrix::new(
        dim,
        dim,
        data.iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect(),
    )
}

/// Caller-chosen eigenbases, used in place of the canonical ones. Each entry
/// must be an orthonormal eigenbasis of the corresponding operator.
#[derive(Clone, Debug, Default)]
pub struct EigenbasisOverrides {
    pub rs: Option<Vec<Vec<Complex64>>>,
    pub r: Option<Vec<Vec<Complex64>>>,
    pub s: Option<Vec<Vec<Complex64>>>,
    pub e: Option<Vec<Vec<Complex64>>>,
    pub rs_final: Option<Vec<Vec<Complex64>>>,
    pub s_final: Option<Vec<Vec<Complex64>>>,
    pub e_final: Option<Vec<Vec<Complex64>>>,
}

/// Spectral data of the initial and final marginals.
#[derive(Clone, Debug)]
pub struct Spectra {
    pub rs: SpectralDecomposition,
    pub r: SpectralDecomposition,
    pub s: SpectralDecomposition,
    pub e: SpectralDecomposition,
}

#[derive(Clone, Debug)]
pub struct EvolvedState {
    pub setup: TripartiteSetup,
    pub rho_initial: DensityMatrix,
    pub rho_final: DensityMatrix,
    pub full_unitary: ComplexMatrix,
    pub initial: Spectra,
    /// `r'` labels reuse the initial `R` eigenbasis: the reference is untouched
    /// and `rho'_R = rho_R` is checked to `1e-10`.
    pub final_: Spectra,
}

fn decompose(
    rho: &DensityMatrix,
    basis: &Option<Vec<Vec<Complex64>>>,
) -> Result<SpectralDecomposition> {
    match basis {
        Some(vectors) => SpectralDecomposition::from_basis(rho.matrix(), vectors.clone()),
        None => rho.spectrum(&EigOptions::default()),
    }
}

pub fn evolve(setup: &TripartiteSetup) -> Result<EvolvedState> {
    evolve_with(setup, &EigenbasisOverrides::default())
}

pub fn evolve_with(
    setup: &TripartiteSetup,
    overrides: &EigenbasisOverrides,
) -> Result<EvolvedState> {
    let rho_initial = setup.initial_state();
    let full_unitary = setup.full_unitary();
    let rho_final = rho_initial.evolve(&full_unitary)?;

    let rho_r = setup.rho_rs.partial_trace(&[0])?;
    let rho_s = setup.rho_rs.partial_trace(&[1])?;
    let initial = Spectra {
        rs: decompose(&setup.rho_rs, &overrides.rs)?,
        r: decompose(&rho_r, &overrides.r)?,
        s: decompose(&rho_s, &overrides.s)?,
        e: decompose(&setup.rho_e, &overrides.e)?,
    };

    let rho_rs_f = rho_final.partial_trace(&[R, S])?;
    let rho_r_f = rho_final.partial_trace(&[R])?;
    let rho_s_f = rho_final.partial_trace(&[S])?;
    let rho_e_f = rho_final.partial_trace(&[E])?;

    let r_drift = rho_r_f.matrix().max_abs_diff(rho_r.matrix());
    if r_drift > TOL_R_SPECTRUM {
        return Err(Error::InvalidState(format!(
            "reference marginal changed by {r_drift:e} under a local S-E interaction"
        )));
    }

    let final_ = Spectra {
        rs: decompose(&rho_rs_f, &overrides.rs_final)?,
        r: initial.r.clone(),
        s: decompose(&rho_s_f, &overrides.s_final)?,
        e: decompose(&rho_e_f, &overrides.e_final)?,
    };

    Ok(EvolvedState {
        setup: setup.clone(),
        rho_initial,
        rho_final,
        full_unitary,
        initial,
        final_,
    })
}

impl EvolvedState {
    pub fn dims(&self) -> (usize, usize, usize) {
        self.setup.dims
    }

    /// `I(S;R)` of the initial state.
    pub fn initial_mutual_information(&self) -> Result<f64> {
        self.rho_initial
            .partial_trace(&[R, S])?
            .mutual_information(&[0], &[1])
    }

    /// `I(S;R)` of the final state.
    pub fn final_mutual_information(&self) -> Result<f64> {
        self.rho_final
            .partial_trace(&[R, S])?
            .mutual_information(&[0], &[1])
    }

    /// `I(S;E)` of the final state.
    pub fn final_system_environment_information(&self) -> Result<f64> {
        self.rho_final
            .partial_trace(&[S, E])?
            .mutual_information(&[0], &[1])
    }

    /// `I(SR;E)` of the final state.
    pub fn final_joint_environment_information(&self) -> Result<f64> {
        self.rho_final.mutual_information(&[R, S], &[E])
    }
}

/// `Delta I = I(S;R)_rho - I(S;R)_rho'`.
pub fn delta_mutual_information(ev: &EvolvedState) -> Result<f64> {
    Ok(ev.initial_mutual_information()? - ev.final_mutual_information()?)
}

/// `(I(R;S)_rho, I(R;SE)_rho')`.
pub fn check_preservation(ev: &EvolvedState) -> Result<(f64, f64)> {
    let lhs = ev.initial_mutual_information()?;
    let rhs = ev.rho_final.mutual_information(&[R], &[S, E])?;
    Ok((lhs, rhs))
}

/// `(Delta I, I(E;R|S)_rho')`.
pub fn cmi_identity(ev: &EvolvedState) -> Result<(f64, f64)> {
    let delta = delta_mutual_information(ev)?;
    let cmi = ev
        .rho_final
        .conditional_mutual_information(&[E], &[R], &[S])?;
    Ok((delta, cmi))
}

/// Full-rank Wishart `rho_RS` and `rho_E` with a Haar-random `U_SE`.
pub fn random_setup<G: Rng + ?Sized>(
    dims: (usize, usize, usize),
    rng: &mut G,
) -> Result<TripartiteSetup> {
    let (dr, ds, de) = dims;
    let rho_rs = DensityMatrix::new(random::wishart_state(dr * ds, rng), vec![dr, ds])?;
    let rho_e = DensityMatrix::new(random::wishart_state(de, rng), vec![de])?;
    let u = random::haar_unitary(ds * de, rng);
    TripartiteSetup::new(rho_rs, rho_e, u, dims, "random")
}

/// Bell-diagonal `rho_RS` with weights from the two preparation angles, a
/// thermal environment qubit at inverse temperature `beta`, and the
/// controlled-Y interaction.
pub fn reference_setup(theta1: f64, theta2: f64, beta: f64) -> Result<TripartiteSetup> {
    let p = bell_probabilities(theta1, theta2);
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (l, &pl) in p.iter().enumerate() {
        rho = &rho + &ComplexMatrix::outer(&bell_state(l)).scale_real(pl);
    }
    let (p0, p1) = thermal_populations(beta);
    TripartiteSetup::new(
        DensityMatrix::new(rho, vec![2, 2])?,
        DensityMatrix::new(ComplexMatrix::diagonal(&[p0, p1]), vec![2])?,
        u_se(),
        (2, 2, 2),
        format!("bell-diagonal theta1={theta1} theta2={theta2} beta={beta}"),
    )
}

/// Default preparation angles of the reference experiment, in radians.
pub const REFERENCE_THETA1: f64 = 0.7098 * std::f64::consts::PI;
pub const REFERENCE_THETA2: f64 = 1.7059 * std::f64::consts::PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn identity_interaction_keeps_state() {
        let setup = reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap();
        let setup = setup.with_unitary(ComplexMatrix::identity(4)).unwrap();
        let ev = evolve(&setup).unwrap();
        assert!(ev.rho_final.matrix().max_abs_diff(ev.rho_initial.matrix()) < 1e-15);
        assert!(delta_mutual_information(&ev).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        let setup = reference_setup(0.3, 0.4, 1.0).unwrap();
        let bad = ComplexMatrix::identity(4).scale_real(1.1);
        assert!(matches!(setup.with_unitary(bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn setup_json_round_trip() {
        let mut rng = rng_from_seed(3);
        let setup = random_setup((2, 2, 2), &mut rng).unwrap();
        let json = serde_json::to_string(&setup.to_file()).unwrap();
        assert!(json.contains("\"rho_RS\"") && json.contains("\"U\""));
        let back = TripartiteSetup::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.u_se(), setup.u_se());
        assert_eq!(back.rho_rs().matrix(), setup.rho_rs().matrix());
    }

    #[test]
    fn shape_errors() {
        let setup = reference_setup(0.3, 0.4, 1.0).unwrap();
        assert!(TripartiteSetup::new(
            setup.rho_rs().clone(),
            setup.rho_e().clone(),
            ComplexMatrix::identity(2),
            (2, 2, 2),
            "bad"
        )
        .is_err());
    }
}

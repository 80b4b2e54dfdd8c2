use num_complex::Complex64;

use super::{AmplitudeFamily, AmplitudeTable};
use crate::circuits::experiment::bell_state;
use crate::error::{Error, Result};
use crate::qlinalg::{basis_vector, inner};
use crate::trajectories::{
    LabelShape, ProjectorOrdering, QuasiDistribution, QuasiKind, TrajectoryIndex,
};
use crate::tripartite::EvolvedState;

/// One table per family.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTables {
    pub bell_overlap: AmplitudeTable,
    pub interaction: AmplitudeTable,
    pub ret: AmplitudeTable,
}

impl AmplitudeTables {
    pub fn new(
        bell_overlap: AmplitudeTable,
        interaction: AmplitudeTable,
        ret: AmplitudeTable,
    ) -> Result<Self> {
        let expected = [
            (&bell_overlap, AmplitudeFamily::BellOverlap),
            (&interaction, AmplitudeFamily::Interaction),
            (&ret, AmplitudeFamily::Return),
        ];
        for (table, family) in expected {
            if table.family != family {
                return Err(Error::Config(format!(
                    "expected a {family:?} table, got {:?}",
                    table.family
                )));
            }
        }
        Ok(Self {
            bell_overlap,
            interaction,
            ret,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &AmplitudeTable> {
        [&self.bell_overlap, &self.interaction, &self.ret].into_iter()
    }
}

/// `Q[zeta] = Re(<psi(l) n|U^dagger|r's'n'> <s'n'|U|sn> <rs|psi(l)>) p_l p_n`
/// for `r' = r` and `l' = 2r' + s'`, zero otherwise.
///
/// Labels are in reference order: `l` is the Bell index, `l'` the
/// computational index of `|r's'>`, the rest computational bits. `p_l` is
/// indexed by Bell label.
pub fn assemble_quasiprobability(
    tables: &AmplitudeTables,
    p_l: &[f64; 4],
    p_n: &[f64; 2],
) -> Result<QuasiDistribution> {
    let shape = LabelShape::from_dims((2, 2, 2));
    let mut values = vec![0.0; shape.len()];
    let mut imag = vec![0.0; shape.len()];
    for z in shape.trajectories() {
        if z.r != z.r_f || z.l_f != 2 * z.r_f + z.s_f {
            continue;
        }
        let back = tables.ret.get(&[z.l, z.n, z.r_f, z.s_f, z.n_f])?;
        let mid = tables.interaction.get(&[z.s_f, z.n_f, z.s, z.n])?;
        let overlap = tables.bell_overlap.get(&[z.r, z.s, z.l])?;
        let q: Complex64 = back * mid * overlap * (p_l[z.l] * p_n[z.n]);
        let k = shape.index(&z);
        values[k] = q.re;
        imag[k] = q.im;
    }
    Ok(QuasiDistribution::from_values(
        shape,
        ProjectorOrdering::Canonical,
        QuasiKind::Forward,
        values,
        Some(imag),
    ))
}

/// Correspondence between the eigenlabels of an evolved qubit setup and the
/// reference labels used by the amplitude tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelAlignment {
    /// `to_reference[slot][engine label]`, slots in `zeta` order.
    to_reference: [Vec<usize>; 8],
    to_engine: [Vec<usize>; 8],
}

/// Reference label of each eigenvector; fails unless every eigenvector is
/// one of the references up to phase.
fn match_basis(
    vectors: &[Vec<Complex64>],
    references: &[Vec<Complex64>],
    what: &str,
) -> Result<Vec<usize>> {
    let mut map = Vec::with_capacity(vectors.len());
    for v in vectors {
        let hit = references
            .iter()
            .position(|r| (inner(r, v).norm() - 1.0).abs() < 1e-8)
            .ok_or_else(|| {
                Error::Config(format!(
                    "{what} eigenbasis does not match the reference labels"
                ))
            })?;
        if map.contains(&hit) {
            return Err(Error::Config(format!(
                "{what} eigenbasis repeats a reference label"
            )));
        }
        map.push(hit);
    }
    Ok(map)
}

fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (i, &j) in map.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

impl LabelAlignment {
    /// For the qubit example: `rho_RS` eigenvectors must be Bell states, the
    /// final `rho'_RS` eigenvectors product states, all other bases
    /// computational.
    pub fn new(ev: &EvolvedState) -> Result<Self> {
        if ev.dims() != (2, 2, 2) {
            return Err(Error::Shape("label alignment needs three qubits".into()));
        }
        let qubit: Vec<_> = (0..2).map(|i| basis_vector(2, i)).collect();
        let pair: Vec<_> = (0..4).map(|i| basis_vector(4, i)).collect();
        let bell: Vec<_> = (0..4).map(bell_state).collect();
        let to_reference = [
            match_basis(&ev.initial.r.basis_vectors, &qubit, "rho_R")?,
            match_basis(&ev.initial.s.basis_vectors, &qubit, "rho_S")?,
            match_basis(&ev.initial.rs.basis_vectors, &bell, "rho_RS")?,
            match_basis(&ev.initial.e.basis_vectors, &qubit, "rho_E")?,
            match_basis(&ev.final_.r.basis_vectors, &qubit, "rho'_R")?,
            match_basis(&ev.final_.s.basis_vectors, &qubit, "rho'_S")?,
            match_basis(&ev.final_.rs.basis_vectors, &pair, "rho'_RS")?,
            match_basis(&ev.final_.e.basis_vectors, &qubit, "rho'_E")?,
        ];
        let to_engine = to_reference.clone().map(|m| invert(&m));
        Ok(Self {
            to_reference,
            to_engine,
        })
    }

    fn apply(maps: &[Vec<usize>; 8], z: &TrajectoryIndex) -> TrajectoryIndex {
        let labels = z.labels();
        TrajectoryIndex::new(std::array::from_fn(|i| maps[i][labels[i]]))
    }

    pub fn to_reference(&self, z: &TrajectoryIndex) -> TrajectoryIndex {
        Self::apply(&self.to_reference, z)
    }

    pub fn to_engine(&self, z: &TrajectoryIndex) -> TrajectoryIndex {
        Self::apply(&self.to_engine, z)
    }

    /// Engine-ordered copy of a reference-ordered distribution.
    pub fn reference_to_engine(&self, q: &QuasiDistribution) -> QuasiDistribution {
        q.relabel(|z| self.to_engine(z))
    }

    /// Reference-ordered copy of an engine-ordered distribution.
    pub fn engine_to_reference(&self, q: &QuasiDistribution) -> QuasiDistribution {
        q.relabel(|z| self.to_reference(z))
    }
}

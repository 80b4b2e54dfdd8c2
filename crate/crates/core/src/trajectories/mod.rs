//! Quasiprobability trajectories over the eigenlabels of the tripartite
//! model, their marginals, the per-trajectory stochastic quantities and the
//! fluctuation theorems they satisfy.
//!
//! A trajectory is `zeta = (r, s, l, n, r', s', l', n')`: labels of the
//! spectral decompositions of `rho_R, rho_S, rho_RS, rho_E` and of their
//! final counterparts. Labels follow the eigenvalue order of the
//! decompositions held by the [`EvolvedState`](crate::tripartite::EvolvedState).

mod export;
mod fdr;
mod quasi;
mod records;
mod theorems;

use serde::{Deserialize, Serialize};

pub use export::{write_trajectory_csv, write_trajectory_json, TrajectoryExport, TrajectoryRow};
pub use fdr::{fdr_check, FdrReport, FdrRow, NearEquilibriumFamily, SetupFamily, UnitaryFamily};
pub use quasi::{quasiprobability, retrodiction_quasiprobability, QuasiDistribution, QuasiKind};
pub use records::{stochastic_record, RecordTable, StochasticRecord, EIGEN_ZERO};
pub use theorems::{
    average, average_entropy_productions, conditional_ft, delta_iota_moment, detailed_ft_check,
    entropy_production_fts, integral_ft, marginal_gamma, marginal_tau, mean_delta_iota,
    support_gammas, two_point_gamma, two_point_tau, CONDITIONING_THRESHOLD, SUPPORT_THRESHOLD,
};

/// Label counts `(d_R, d_S, d_RS, d_E)`; final labels share the same sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelShape {
    pub r: usize,
    pub s: usize,
    pub l: usize,
    pub n: usize,
}

impl LabelShape {
    pub fn from_dims(dims: (usize, usize, usize)) -> Self {
        Self {
            r: dims.0,
            s: dims.1,
            l: dims.0 * dims.1,
            n: dims.2,
        }
    }

    /// Number of `(r, s, l, n)` combinations; the same for primed labels.
    pub fn half_len(&self) -> usize {
        self.r * self.s * self.l * self.n
    }

    pub fn len(&self) -> usize {
        self.half_len() * self.half_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn half_index(&self, r: usize, s: usize, l: usize, n: usize) -> usize {
        ((r * self.s + s) * self.l + l) * self.n + n
    }

    fn half_labels(&self, k: usize) -> (usize, usize, usize, usize) {
        let n = k % self.n;
        let k = k / self.n;
        let l = k % self.l;
        let k = k / self.l;
        (k / self.s, k % self.s, l, n)
    }

    /// Flat index, `r` slowest and `n'` fastest.
    pub fn index(&self, z: &TrajectoryIndex) -> usize {
        self.half_index(z.r, z.s, z.l, z.n) * self.half_len()
            + self.half_index(z.r_f, z.s_f, z.l_f, z.n_f)
    }

    pub fn trajectory(&self, flat: usize) -> TrajectoryIndex {
        let (r, s, l, n) = self.half_labels(flat / self.half_len());
        let (r_f, s_f, l_f, n_f) = self.half_labels(flat % self.half_len());
        TrajectoryIndex {
            r,
            s,
            l,
            n,
            r_f,
            s_f,
            l_f,
            n_f,
        }
    }

    pub fn contains(&self, z: &TrajectoryIndex) -> bool {
        z.r < self.r
            && z.s < self.s
            && z.l < self.l
            && z.n < self.n
            && z.r_f < self.r
            && z.s_f < self.s
            && z.l_f < self.l
            && z.n_f < self.n
    }

    pub fn trajectories(&self) -> impl Iterator<Item = TrajectoryIndex> + '_ {
        (0..self.len()).map(|i| self.trajectory(i))
    }
}

/// `zeta = (r, s, l, n, r', s', l', n')`; primed labels carry an `_f` suffix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub r: usize,
    pub s: usize,
    pub l: usize,
    pub n: usize,
    pub r_f: usize,
    pub s_f: usize,
    pub l_f: usize,
    pub n_f: usize,
}

impl TrajectoryIndex {
    pub fn new(labels: [usize; 8]) -> Self {
        let [r, s, l, n, r_f, s_f, l_f, n_f] = labels;
        Self {
            r,
            s,
            l,
            n,
            r_f,
            s_f,
            l_f,
            n_f,
        }
    }

    pub fn labels(&self) -> [usize; 8] {
        [
            self.r, self.s, self.l, self.n, self.r_f, self.s_f, self.l_f, self.n_f,
        ]
    }

    pub fn gamma(&self) -> GammaIndex {
        GammaIndex {
            s: self.s,
            n: self.n,
            s_f: self.s_f,
            n_f: self.n_f,
        }
    }

    pub fn tau(&self) -> TauIndex {
        TauIndex {
            l: self.l,
            l_f: self.l_f,
            n: self.n,
            n_f: self.n_f,
        }
    }
}

/// `gamma = (s, n, s', n')`
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GammaIndex {
    pub s: usize,
    pub n: usize,
    pub s_f: usize,
    pub n_f: usize,
}

impl GammaIndex {
    pub fn new(s: usize, n: usize, s_f: usize, n_f: usize) -> Self {
        Self { s, n, s_f, n_f }
    }
}

impl std::fmt::Display for GammaIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}{}{}", self.s, self.n, self.s_f, self.n_f)
    }
}

/// `tau = (l, l', n, n')`
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TauIndex {
    pub l: usize,
    pub l_f: usize,
    pub n: usize,
    pub n_f: usize,
}

/// Order in which the projectors of each time slice act.
///
/// The default applies `Pi_ln` then `Pi_rs` before the evolution, and
/// `Pi_r's'` then `Pi_l'n'` after it. Retrodiction always applies the
/// reversed sequence.
///
/// The initial and retrodicted states always stay adjacent to their own
/// eigenprojectors (`Pi_ln` and `Pi_l'n'`), which keeps the integral and
/// conditional theorems valid in every ordering. The pointwise detailed
/// relation additionally needs `Pi_r's'` next to the evolution, so with the
/// final pair swapped it holds only on `r = r'`. Because
/// `Re Tr X = Re Tr X^dagger`, this makes `SwappedInitial` coincide with
/// `SwappedFinal` and `SwappedBoth` with `Canonical`; they are kept as
/// separate variants so callers can name the order they mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorOrdering {
    #[default]
    Canonical,
    /// `Pi_rs` acts on the state before `Pi_ln`.
    SwappedInitial,
    /// `Pi_l'n'` acts before `Pi_r's'`.
    SwappedFinal,
    SwappedBoth,
}

impl ProjectorOrdering {
    pub const ALL: [ProjectorOrdering; 4] = [
        ProjectorOrdering::Canonical,
        ProjectorOrdering::SwappedInitial,
        ProjectorOrdering::SwappedFinal,
        ProjectorOrdering::SwappedBoth,
    ];

    fn global_first_initial(self) -> bool {
        matches!(self, Self::Canonical | Self::SwappedFinal)
    }

    fn local_first_final(self) -> bool {
        matches!(self, Self::Canonical | Self::SwappedInitial)
    }
}

/// Deterministic pairwise summation in slice order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_round_trip() {
        let shape = LabelShape::from_dims((2, 3, 2));
        assert_eq!(shape.l, 6);
        for flat in [0, 1, 17, 999, shape.len() - 1] {
            let z = shape.trajectory(flat);
            assert!(shape.contains(&z));
            assert_eq!(shape.index(&z), flat);
        }
        let z = TrajectoryIndex::new([1, 2, 5, 1, 0, 1, 3, 0]);
        assert_eq!(shape.trajectory(shape.index(&z)), z);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}

use serde::{Deserialize, Serialize};

use super::{LabelShape, TrajectoryIndex};
use crate::tripartite::EvolvedState;

/// Eigenvalues at or below this are treated as zero: their logarithm is
/// never taken.
pub const EIGEN_ZERO: f64 = 1e-14;

/// Stochastic quantities of one trajectory, in nats. A field is `None` when
/// it would need the logarithm of a zero eigenvalue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StochasticRecord {
    /// `ln(p_l / (p_s p_r)) - ln(p_l' / (p_s' p_r'))`
    pub delta_iota: Option<f64>,
    /// `ln p_s + ln p_n - ln p_s' - ln p_n'`
    pub sigma_s: Option<f64>,
    /// `ln p_l + ln p_n - ln p_l' - ln p_n'`
    pub sigma_sr: Option<f64>,
}

impl StochasticRecord {
    pub fn is_valid(&self) -> bool {
        self.delta_iota.is_some() && self.sigma_s.is_some() && self.sigma_sr.is_some()
    }
}

fn ln(p: f64) -> Option<f64> {
    (p > EIGEN_ZERO).then(|| p.ln())
}

struct Logs {
    r: Vec<Option<f64>>,
    s: Vec<Option<f64>>,
    l: Vec<Option<f64>>,
    n: Vec<Option<f64>>,
    r_f: Vec<Option<f64>>,
    s_f: Vec<Option<f64>>,
    l_f: Vec<Option<f64>>,
    n_f: Vec<Option<f64>>,
}

impl Logs {
    fn new(ev: &EvolvedState) -> Self {
        let logs = |v: &[f64]| v.iter().map(|&p| ln(p)).collect();
        Self {
            r: logs(&ev.initial.r.eigenvalues),
            s: logs(&ev.initial.s.eigenvalues),
            l: logs(&ev.initial.rs.eigenvalues),
            n: logs(&ev.initial.e.eigenvalues),
            r_f: logs(&ev.final_.r.eigenvalues),
            s_f: logs(&ev.final_.s.eigenvalues),
            l_f: logs(&ev.final_.rs.eigenvalues),
            n_f: logs(&ev.final_.e.eigenvalues),
        }
    }

    fn record(&self, z: &TrajectoryIndex) -> StochasticRecord {
        let (r, s, l, n) = (self.r[z.r], self.s[z.s], self.l[z.l], self.n[z.n]);
        let (r_f, s_f, l_f, n_f) = (
            self.r_f[z.r_f],
            self.s_f[z.s_f],
            self.l_f[z.l_f],
            self.n_f[z.n_f],
        );
        let delta_iota = (|| Some((l? - s? - r?) - (l_f? - s_f? - r_f?)))();
        let sigma_s = (|| Some(s? + n? - s_f? - n_f?))();
        let sigma_sr = (|| Some(l? + n? - l_f? - n_f?))();
        StochasticRecord {
            delta_iota,
            sigma_s,
            sigma_sr,
        }
    }
}

/// Record of a single trajectory.
pub fn stochastic_record(ev: &EvolvedState, zeta: &TrajectoryIndex) -> StochasticRecord {
    Logs::new(ev).record(zeta)
}

/// Records of every trajectory, laid out like a
/// [`QuasiDistribution`](super::QuasiDistribution).
#[derive(Clone, Debug, PartialEq)]
pub struct RecordTable {
    pub shape: LabelShape,
    records: Vec<StochasticRecord>,
}

impl RecordTable {
    pub fn new(ev: &EvolvedState) -> Self {
        let shape = LabelShape::from_dims(ev.dims());
        let logs = Logs::new(ev);
        let records = shape.trajectories().map(|z| logs.record(&z)).collect();
        Self { shape, records }
    }

    pub fn get(&self, z: &TrajectoryIndex) -> &StochasticRecord {
        &self.records[self.shape.index(z)]
    }

    pub fn records(&self) -> &[StochasticRecord] {
        &self.records
    }
}

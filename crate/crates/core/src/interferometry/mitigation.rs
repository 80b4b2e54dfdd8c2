use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{
    interference_prefix, interference_suffix, invert_part, outcome_indices, AmplitudeTask,
};
use crate::circuits::{measured_distribution, Circuit, DensityState, NoiseModel};
use crate::error::Result;

/// Grid angles with `|sin theta|` below this are skipped.
pub const MITIGATION_MIN_SIN: f64 = 0.1;
const GRID_STEPS: usize = 180;
/// Residuals closer than this count as tied.
const TIE_TOLERANCE: f64 = 1e-14;

/// Outcome of the angle search for one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mitigation {
    pub theta: f64,
    /// `|estimate - exact|` at `theta` under the noise model, infinite
    /// shots.
    pub residual: f64,
    /// The same residual at `theta = pi/2`.
    pub baseline_residual: f64,
}

/// Residual of the noisy inversion at `theta`, reusing the simulated
/// prefix state.
fn residual_at(
    task: &AmplitudeTask,
    prefix: &DensityState,
    noise: &NoiseModel,
    theta: f64,
    exact: f64,
) -> Result<f64> {
    let task = task.with_theta(theta);
    let mut tail = Circuit::with_registers(super::payload_registers(&task))?;
    interference_suffix(&task, &mut tail)?;
    let mut state = prefix.clone();
    for gate in tail.gates().iter().filter(|g| !g.is_measurement()) {
        state.apply(gate, noise)?;
    }
    let probs = measured_distribution(&state, &tail, noise);
    let (i0, i1) = outcome_indices(&task);
    Ok((invert_part(probs[i0], probs[i1], theta, task.part)? - exact).abs())
}

/// Grid search over `theta = k pi / 180` in `(0, pi)`, skipping angles with
/// `|sin theta| < 0.1`, for the angle whose exact noisy probabilities invert
/// closest to the noiseless amplitude. Ties (within 1e-14) go to the
/// smallest angle among those no worse than `pi/2`.
pub fn select_mitigation_angle(task: &AmplitudeTask, noise: &NoiseModel) -> Result<Mitigation> {
    noise.validate()?;
    let exact = task.part.of(task.exact_amplitude()?);
    let prefix_circuit = interference_prefix(task)?;
    let mut prefix = DensityState::zero(prefix_circuit.num_qubits());
    for gate in prefix_circuit.gates() {
        prefix.apply(gate, noise)?;
    }
    let baseline_residual = residual_at(task, &prefix, noise, FRAC_PI_2, exact)?;
    let mut grid = Vec::with_capacity(GRID_STEPS);
    for k in 1..GRID_STEPS {
        let theta = k as f64 * PI / GRID_STEPS as f64;
        if theta.sin().abs() >= MITIGATION_MIN_SIN {
            grid.push((theta, residual_at(task, &prefix, noise, theta, exact)?));
        }
    }
    // Only angles at least as good as pi/2 (itself on the grid) qualify.
    grid.retain(|&(_, r)| r <= baseline_residual);
    let lowest = grid
        .iter()
        .map(|&(_, r)| r)
        .fold(baseline_residual, f64::min);
    let (theta, residual) = grid
        .into_iter()
        .find(|&(_, r)| r <= lowest + TIE_TOLERANCE)
        .unwrap_or((FRAC_PI_2, baseline_residual));
    let best = Mitigation {
        theta,
        residual,
        baseline_residual,
    };
    Ok(best)
}

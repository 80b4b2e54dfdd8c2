//! Quasiprobability trajectories for tripartite (reference / system /
//! environment) unitary dynamics, the information fluctuation theorems they
//! satisfy, and a gate-level emulation of the interference experiment that
//! measures the underlying amplitudes.
//!
//! Modules, bottom-up:
//!
//! * [`qlinalg`]: dense complex linear algebra and entropies.
//! * [`tripartite`]: the R/S/E model and averaged information quantities.
//! * [`trajectories`]: the quasiprobability engine and fluctuation theorems.
//! * [`circuits`]: statevector / density-matrix simulation, shot sampling, noise.
//! * [`interferometry`]: ancilla-interference amplitude estimation and mitigation.
//! * [`harness`]: configuration, orchestration and report files.

#![allow(clippy::needless_range_loop)]

pub mod circuits;
pub mod error;
pub mod harness;
pub mod interferometry;
pub mod qlinalg;
pub mod rng;
pub mod trajectories;
pub mod tripartite;

pub use error::{Error, Result};

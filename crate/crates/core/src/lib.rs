//! Bi-objective NSGA-II with three survival-selection engines and the
//! approximation measures used to compare them on `OneMinMax`.
//!
//! The crate is organised bottom-up:
//!
//! * [`types`] and [`rng`]: genomes, objective vectors, individuals and the
//!   seedable randomness every stochastic operation draws from.
//! * [`problems`]: `OneMinMax` and `LOTZ`.
//! * [`ranking`]: non-dominated sorting and crowding distance.
//! * [`variation`]: mating selection and mutation.
//! * [`survival`]: initial-crowding-distance, current-crowding-distance and
//!   steady-state selection, plus a recompute-from-scratch reference engine.
//! * [`algorithms`]: the optimizer loops and their run traces.
//! * [`metrics`]: maximal empty interval, multiplicative epsilon and
//!   hypervolume.
//! * [`scenarios`]: synthetic combined populations on which the classic
//!   selection is known to leave large gaps.

pub mod algorithms;
pub mod error;
pub mod metrics;
pub mod problems;
pub mod ranking;
pub mod rng;
pub mod scenarios;
pub mod stats;
pub mod survival;
pub mod types;
pub mod variation;

pub use error::{Error, Result};
pub use rng::RngHandle;
pub use types::{strictly_dominates, Genome, Individual, Objectives, Population};

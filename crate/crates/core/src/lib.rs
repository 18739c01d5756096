//! Simulation and analysis of the open one-dimensional Schelling model on a
//! ring.

pub mod dynamics;
pub mod harmony;
pub mod io;
pub mod numerics;
pub mod probe;
pub mod render;
pub mod ring;
pub mod rng;
pub mod structure;
pub mod sweep;
pub mod thresholds;
pub mod tolerance;

pub use dynamics::{run, Dynamic, RunConfig, RunRecord, Termination};
pub use ring::{Color, NodeStatus, Ring, RingError};
pub use thresholds::{classify, Classification, Domination, Prediction, ThresholdSet};
pub use tolerance::{parse_tolerance, Scenario, Tolerance, ToleranceError};

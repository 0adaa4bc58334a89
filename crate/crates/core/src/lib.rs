//! Random one-bit maps from the unit sphere `S^{N-1}` into the Hamming cube
//! `{0,1}^m`.
//!
//! A map `B_m` is drawn as `m` iid uniform directions `θ_1..θ_m`; a point `x`
//! becomes the code whose bit `j` is set iff `x·θ_j ≥ 0`. The normalized
//! Hamming distance between two codes is an unbiased estimate of the
//! normalized geodesic distance `arccos(x·y)/π` between the points.
//!
//! The crate is organised as:
//!
//! - [`geometry`]: sphere points, uniform directions, the geodesic metric.
//! - [`embedding`]: the map itself, bit-packed codes, injectivity and δ-RIP checks.
//! - [`bounds`]: closed-form sample-size requirements and phase-transition windows.
//! - [`oracles`]: exact dyadic probabilities for small instances.
//! - [`montecarlo`]: a seeded, partition-independent trial engine and m-sweeps.

pub mod bounds;
pub mod embedding;
mod error;
pub mod exact;
pub mod geometry;
pub mod montecarlo;
pub mod oracles;
pub mod report;
pub mod seed;

pub use bounds::{BoundsReport, EtaForm, FormulaId, PhaseWindow};
pub use embedding::{BitCode, Boundary, CodeSet, EmbeddingMap, RipReport, RipViolation};
pub use error::{Error, Result};
pub use exact::{ExactMethod, ExactProbability};
pub use geometry::{PointSet, UnitVector};
pub use montecarlo::{EstimateRow, Mode, PointSource, SweepResult, TrialConfig};
pub use report::format_sig;

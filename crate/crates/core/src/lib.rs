//! Central similarity proximity catch digraphs (PCDs) built from two-class
//! data on the real line.
//!
//! The anchor class `Y` partitions a support interval into cells; each point
//! of the target class `X` receives a proximity region inside its cell, and
//! the digraph has an arc `x -> z` whenever `z` lies in the region of `x`.
//! The crate computes the relative arc density of these digraphs, the
//! closed-form asymptotic mean and variance of that density under uniform
//! data, and independent quadrature and Monte Carlo checks of those values.
//!
//! Modules:
//! - [`geometry1d`]: partitions, proximity regions and their Γ1 duals.
//! - [`digraph`]: arc construction and relative density.
//! - [`moments`]: closed-form asymptotic moments, mixtures, convergence rates.
//! - [`oracle`]: quadrature reconstruction of the arc and case probabilities.
//! - [`montecarlo`]: reproducible parallel simulation and normality checks.
//! - [`inference`]: the uniform-null z-test on relative density.
//! - [`geometry2d`]: the single-triangle planar extension.

pub mod digraph;
pub mod error;
pub mod geometry1d;
pub mod geometry2d;
pub mod inference;
pub mod moments;
pub mod montecarlo;
pub mod oracle;
pub mod quadrature;
mod stream;

pub use digraph::{DensityReport, PcdDigraph};
pub use error::{PcdError, Result};
pub use geometry1d::{
    AnchorSet, Cell, CellKind, IntervalPartition, Params, RealInterval, RegionKind,
    SupportInterval, Tau,
};
pub use inference::TestResult;
pub use moments::{MixtureMoments, MomentPair, OptimalParameters, Regime};
pub use montecarlo::{DensityVersion, JointHPmf, MCConfig, MCReport};
pub use oracle::CaseProbabilities;

//! Simulator and diagnostics for the quasilinear wave system
//! `□W + u ∂_y² W = N(W, ∂W)` on `R^{1+3} × S¹`, `W = (u, v)`, reduced to
//! radial symmetry in `x` and Fourier modes in `y`.
//!
//! Numerical kernels are generic over [`Real`] (`f32`, `f64`); the `*64`
//! aliases fix the usual choice.

pub mod analysis;
pub mod energies;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod jet;
pub mod nullforms;
pub mod pipeline;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use fields::{ModeField, ModePart, RadialGrid};
pub use geometry::{Branch, MultiIndex, VectorFieldId};
pub use pipeline::{simulate, RunArtifacts};
pub use scalar::Real;
pub use solver::{Ablation, Nonlinearity, SolverConfig};

pub type ModeField64 = ModeField<f64>;
pub type ModeField32 = ModeField<f32>;
pub type RadialGrid64 = RadialGrid<f64>;
pub type EvolvedPair64 = solver::EvolvedPair<f64>;
pub type Leaf64 = energies::Leaf<f64>;
pub type RunArtifacts64 = RunArtifacts<f64>;

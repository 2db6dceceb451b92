//! Mass-consistent wind downscaling over terrain-following hexahedral meshes.
//!
//! Given ground elevations and an initial wind `u0`, [`pipeline::downscale`]
//! finds the wind closest to `u0` in the `A`-weighted least-squares sense that
//! is divergence free and tangent to the ground. The Lagrange multiplier of
//! that constraint solves a generalized Poisson problem, discretized with
//! trilinear hexahedra and solved by geometric multigrid with adaptive
//! semicoarsening.

// `!(x > 0.0)` is used on purpose to reject NaN, and index loops mirror the
// matrix formulas they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod mesh;
pub mod mgsolver;
pub mod pipeline;

pub use assembly::{MultiplierField, PenaltyTensor, RhsField, StencilOperator, WindField};
pub use error::{Error, Result};
pub use grid::Dims;
pub use mesh::{LevelProfile, StructuredMesh, TerrainKind, TerrainSurface};
pub use mgsolver::{CycleParams, SolveReport};
pub use pipeline::{downscale, DownscaleRequest, DownscaleResult, WindSpec};

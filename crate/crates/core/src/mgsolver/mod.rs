//! Geometric multigrid with adaptive semicoarsening for the multiplier system.

mod cycle;
mod galerkin;
mod hierarchy;
mod plan;
mod prolongation;
mod smoother;

pub use cycle::{convergence_rate, solve, SolveReport, Workspace};
pub use galerkin::galerkin_coarsen;
pub use hierarchy::{build_hierarchy, coarsest_solve, CycleParams, Level, MultigridHierarchy};
pub use plan::{decide_coarsening, operator_vertical_scale, vertical_scale, CoarseningPlan, HORIZONTAL_THRESHOLD, VERTICAL_THRESHOLD};
pub use prolongation::{build_prolongation, Prolongation};
pub use smoother::{gauss_seidel_sweep, smooth, COLORS};

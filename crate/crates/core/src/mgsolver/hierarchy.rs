use log::debug;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::assembly::{PenaltyTensor, StencilOperator};
use crate::error::{Error, Result};
use crate::grid::Dims;

use super::galerkin::galerkin_coarsen;
use super::plan::{operator_vertical_scale, plan_level};
use super::prolongation::{build_prolongation, Prolongation};
use super::{smooth, CoarseningPlan};

/// Multigrid cycle settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleParams {
    pub pre_smooth: usize,
    pub post_smooth: usize,
    pub max_cycles: usize,
    pub rel_tol: f64,
    /// Levels with at most this many free nodes are solved directly and end
    /// the hierarchy.
    pub coarsest_max_nodes: usize,
    /// Sweeps used on a coarsest level too large for the direct solve.
    pub coarsest_iters: usize,
}

impl Default for CycleParams {
    fn default() -> Self {
        Self {
            pre_smooth: 2,
            post_smooth: 2,
            max_cycles: 50,
            rel_tol: 1e-8,
            coarsest_max_nodes: 500,
            coarsest_iters: 50,
        }
    }
}

impl CycleParams {
    pub fn validate(&self) -> Result<()> {
        if self.pre_smooth + self.post_smooth == 0 {
            return Err(Error::InvalidArgument(
                "at least one smoothing sweep per cycle is required".into(),
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// One grid of the hierarchy.
#[derive(Debug, Clone)]
pub struct Level {
    pub h1: f64,
    pub h2: f64,
    /// Layer thicknesses at the reference column.
    pub h3: Vec<f64>,
    pub op: StencilOperator,
    /// Interpolation from the next coarser level onto this one.
    pub prolongation: Option<Prolongation>,
}

impl Level {
    pub fn new(op: StencilOperator, h1: f64, h2: f64, h3: Vec<f64>) -> Result<Self> {
        if h3.len() + 1 != op.dims().n3 {
            return Err(Error::DimensionMismatch(format!(
                "{} layer thicknesses for operator {}",
                h3.len(),
                op.dims()
            )));
        }
        Ok(Self {
            h1,
            h2,
            h3,
            op,
            prolongation: None,
        })
    }

    pub fn dims(&self) -> Dims {
        self.op.dims()
    }

    pub fn plan(&self) -> Option<&CoarseningPlan> {
        self.prolongation.as_ref().map(|p| p.plan())
    }
}

/// Direct solver for the free block of the coarsest operator.
#[derive(Debug, Clone)]
pub(crate) struct DenseSolver {
    free: Vec<usize>,
    factor: Cholesky<f64, Dyn>,
}

impl DenseSolver {
    pub fn new(op: &StencilOperator) -> Result<Self> {
        let d = op.dims();
        let free: Vec<usize> = (0..d.len()).filter(|&p| !op.is_dirichlet(p)).collect();
        let mut position = vec![usize::MAX; d.len()];
        for (r, &p) in free.iter().enumerate() {
            position[p] = r;
        }
        let n = free.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (r, &p) in free.iter().enumerate() {
            let (i, j, k) = d.coords(p);
            for s in 0..27 {
                if let Some(q) = op.neighbor(i, j, k, s) {
                    let c = position[q];
                    if c != usize::MAX {
                        m[(r, c)] = op.coefficient(p, s);
                    }
                }
            }
        }
        let factor = Cholesky::new(m).ok_or(Error::SingularCoarse)?;
        Ok(Self { free, factor })
    }

    pub fn solve_into(&self, f: &[f64], x: &mut [f64]) {
        let b = DVector::from_iterator(self.free.len(), self.free.iter().map(|&p| f[p]));
        let sol = self.factor.solve(&b);
        x.fill(0.0);
        for (r, &p) in self.free.iter().enumerate() {
            x[p] = sol[r];
        }
    }
}

/// Solve the coarsest-level system directly when small enough, otherwise
/// with `coarsest_iters` smoothing sweeps from `x`.
pub fn coarsest_solve(op: &StencilOperator, f: &[f64], x: &mut [f64], params: &CycleParams) -> Result<()> {
    let free = op.free_count();
    if free == 0 {
        x.fill(0.0);
        return Ok(());
    }
    if free <= params.coarsest_max_nodes {
        DenseSolver::new(op)?.solve_into(f, x);
        Ok(())
    } else {
        smooth(op, x, f, params.coarsest_iters)
    }
}

/// Grids from finest (index 0) to coarsest with their transfer operators.
#[derive(Debug, Clone)]
pub struct MultigridHierarchy {
    pub(crate) levels: Vec<Level>,
    pub(crate) coarse_solver: Option<DenseSolver>,
    pub(crate) coarsest_iters: usize,
}

/// Coarsen until the free-node count drops to `coarsest_max_nodes` or the
/// planner stops coarsening.
pub fn build_hierarchy(finest: Level, penalty: &PenaltyTensor, params: &CycleParams) -> Result<MultigridHierarchy> {
    params.validate()?;
    let vscale = operator_vertical_scale(penalty)?;
    let mut levels = vec![finest];
    loop {
        let cur = levels.last().expect("hierarchy starts with the finest level");
        let d = cur.dims();
        if cur.op.free_count() <= params.coarsest_max_nodes {
            break;
        }
        let can_halve = d.n1 % 2 == 1 && d.n2 % 2 == 1 && d.n1 >= 3 && d.n2 >= 3;
        let plan = plan_level(cur.h1, cur.h2, &cur.h3, vscale, can_halve)?;
        if !plan.coarsens() {
            break;
        }
        let p = build_prolongation(&plan, d)?;
        let op = galerkin_coarsen(&cur.op, &p)?;
        let factor = if plan.horizontal { 2.0 } else { 1.0 };
        let h3 = plan
            .kept_layers
            .windows(2)
            .map(|w| cur.h3[w[0]..w[1]].iter().sum())
            .collect();
        debug!(
            "level {}: {} -> {} (horizontal={}, layers {:?})",
            levels.len(),
            d,
            op.dims(),
            plan.horizontal,
            plan.kept_layers
        );
        let coarse = Level {
            h1: cur.h1 * factor,
            h2: cur.h2 * factor,
            h3,
            op,
            prolongation: None,
        };
        levels.last_mut().expect("non-empty").prolongation = Some(p);
        levels.push(coarse);
    }
    let coarsest = &levels.last().expect("non-empty").op;
    let free = coarsest.free_count();
    let coarse_solver = if free > 0 && free <= params.coarsest_max_nodes {
        Some(DenseSolver::new(coarsest)?)
    } else {
        None
    };
    Ok(MultigridHierarchy {
        levels,
        coarse_solver,
        coarsest_iters: params.coarsest_iters,
    })
}

impl MultigridHierarchy {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &Level {
        &self.levels[0]
    }

    pub fn level_dims(&self) -> Vec<Dims> {
        self.levels.iter().map(Level::dims).collect()
    }

    /// `true` when the coarsest level is solved by factorization.
    pub fn has_direct_coarse_solve(&self) -> bool {
        self.coarse_solver.is_some()
    }
}

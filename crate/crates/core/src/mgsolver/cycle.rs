use log::{debug, info};

use crate::assembly::{MultiplierField, RhsField};
use crate::error::{Error, Result};
use crate::grid::Dims;

use super::hierarchy::{CycleParams, MultigridHierarchy};
use super::smooth;

/// Convergence record of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Relative residuals; entry 0 is the initial guess, entry `c` follows
    /// cycle `c`.
    pub residual_history: Vec<f64>,
    /// Geometric-mean reduction per cycle over cycles 2 to the last.
    pub rate: f64,
    pub cycles_used: usize,
    pub converged: bool,
    pub level_dims: Vec<Dims>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    pub fn initial_residual(&self) -> f64 {
        self.residual_history.first().copied().unwrap_or(0.0)
    }
}

/// `(r_n / r_1)^(1/(n-1))`; with a single cycle, `r_1 / r_0`.
pub fn convergence_rate(history: &[f64]) -> f64 {
    let n = history.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => {
            if history[0] > 0.0 {
                history[1] / history[0]
            } else {
                0.0
            }
        }
        _ => {
            if history[1] > 0.0 {
                (history[n] / history[1]).powf(1.0 / (n - 1) as f64)
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct LevelWork {
    x: Vec<f64>,
    f: Vec<f64>,
    r: Vec<f64>,
}

/// Per-solve scratch vectors, one set per level.
#[derive(Debug, Clone)]
pub struct Workspace {
    levels: Vec<LevelWork>,
}

impl Workspace {
    pub fn new(h: &MultigridHierarchy) -> Self {
        Self {
            levels: h
                .levels
                .iter()
                .map(|l| {
                    let n = l.dims().len();
                    LevelWork {
                        x: vec![0.0; n],
                        f: vec![0.0; n],
                        r: vec![0.0; n],
                    }
                })
                .collect(),
        }
    }
}

impl MultigridHierarchy {
    fn coarsest(&self, x: &mut [f64], f: &[f64]) -> Result<()> {
        let level = self.levels.last().expect("non-empty hierarchy");
        match &self.coarse_solver {
            Some(dense) => {
                dense.solve_into(f, x);
                Ok(())
            }
            None if level.op.free_count() == 0 => {
                x.fill(0.0);
                Ok(())
            }
            None => smooth(&level.op, x, f, self.coarsest_iters),
        }
    }

    fn cycle_at(
        &self,
        l: usize,
        x: &mut [f64],
        f: &[f64],
        work: &mut [LevelWork],
        params: &CycleParams,
    ) -> Result<()> {
        if l + 1 == self.levels.len() {
            return self.coarsest(x, f);
        }
        let level = &self.levels[l];
        let p = level
            .prolongation
            .as_ref()
            .ok_or_else(|| Error::Internal(format!("level {l} has no prolongation")))?;
        smooth(&level.op, x, f, params.pre_smooth)?;

        let (here, below) = work.split_first_mut().expect("one workspace per level");
        level.op.residual(x, f, &mut here.r)?;
        let mut fc = std::mem::take(&mut below[0].f);
        let mut xc = std::mem::take(&mut below[0].x);
        p.restrict_into(&here.r, &mut fc)?;
        let coarse_op = &self.levels[l + 1].op;
        for (v, m) in fc.iter_mut().zip(coarse_op.dirichlet_mask()) {
            if *m {
                *v = 0.0;
            }
        }
        xc.fill(0.0);
        let result = self.cycle_at(l + 1, &mut xc, &fc, below, params);
        if result.is_ok() {
            p.prolong_add(&xc, x)?;
        }
        below[0].f = fc;
        below[0].x = xc;
        result?;

        smooth(&level.op, x, f, params.post_smooth)
    }

    /// One V-cycle on level `level` updating `x` in place.
    pub fn v_cycle(
        &self,
        level: usize,
        x: &mut [f64],
        f: &[f64],
        work: &mut Workspace,
        params: &CycleParams,
    ) -> Result<()> {
        let d = self.levels[level].dims();
        if x.len() != d.len() || f.len() != d.len() {
            return Err(Error::DimensionMismatch(format!(
                "cycle on {d} got {} unknowns and {} right-hand side values",
                x.len(),
                f.len()
            )));
        }
        self.cycle_at(level, x, f, &mut work.levels[level..], params)
    }
}

/// Iterate V-cycles until the relative residual reaches `rel_tol` or
/// `max_cycles` is spent. `x0` warm-starts the iteration; its Dirichlet
/// entries are reset to zero.
pub fn solve(
    h: &MultigridHierarchy,
    f: &RhsField,
    x0: Option<&MultiplierField>,
    params: &CycleParams,
) -> Result<(MultiplierField, SolveReport)> {
    params.validate()?;
    let op = &h.finest().op;
    let d = op.dims();
    if f.dims() != d {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side {} vs operator {d}",
            f.dims()
        )));
    }
    let mut x = match x0 {
        Some(x0) if x0.dims() != d => {
            return Err(Error::DimensionMismatch(format!(
                "warm start {} vs operator {d}",
                x0.dims()
            )))
        }
        Some(x0) => x0.values().to_vec(),
        None => vec![0.0; d.len()],
    };
    for (v, m) in x.iter_mut().zip(op.dirichlet_mask()) {
        if *m {
            *v = 0.0;
        }
    }
    let fv = f.values();
    let mut work = Workspace::new(h);
    let (_, r0) = op.residual_norm(&x, fv)?;
    let mut history = vec![r0];
    let mut converged = r0 <= params.rel_tol;
    let mut cycles = 0;
    while !converged && cycles < params.max_cycles {
        h.v_cycle(0, &mut x, fv, &mut work, params)?;
        cycles += 1;
        let (_, rel) = op.residual_norm(&x, fv)?;
        debug!("cycle {cycles}: relative residual {rel:e}");
        history.push(rel);
        converged = rel <= params.rel_tol;
        if !rel.is_finite() || (cycles >= 3 && rel > 10.0 * history[cycles - 3]) {
            let report = SolveReport {
                rate: convergence_rate(&history),
                residual_history: history,
                cycles_used: cycles,
                converged: false,
                level_dims: h.level_dims(),
            };
            return Err(Error::Diverged {
                report: Box::new(report),
            });
        }
    }
    let report = SolveReport {
        rate: convergence_rate(&history),
        residual_history: history,
        cycles_used: cycles,
        converged,
        level_dims: h.level_dims(),
    };
    info!(
        "multigrid: {} cycles, relative residual {:e}, rate {:.4}",
        report.cycles_used,
        report.final_residual(),
        report.rate
    );
    Ok((MultiplierField::from_values(d, x)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_window_skips_first_cycle() {
        let h = [1.0, 0.5, 0.05, 0.005];
        assert!((convergence_rate(&h) - 0.1).abs() < 1e-12);
        assert_eq!(convergence_rate(&[1.0, 0.3]), 0.3);
        assert_eq!(convergence_rate(&[1.0]), 0.0);
    }
}

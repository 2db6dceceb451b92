use crate::assembly::PenaltyTensor;
use crate::error::{Error, Result};

/// How one level is coarsened into the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseningPlan {
    /// Halve the node lattice in both `i` and `j`.
    pub horizontal: bool,
    /// Fine node layers kept on the coarse level, increasing, always
    /// containing `0` and the top layer.
    pub kept_layers: Vec<usize>,
}

impl CoarseningPlan {
    /// The plan that keeps every node.
    pub fn identity(layers: usize) -> Self {
        Self {
            horizontal: false,
            kept_layers: (0..=layers).collect(),
        }
    }

    pub fn coarsens_vertically(&self) -> bool {
        self.kept_layers.windows(2).any(|w| w[1] - w[0] > 1)
    }

    pub fn coarsens(&self) -> bool {
        self.horizontal || self.coarsens_vertically()
    }

    pub fn top(&self) -> usize {
        *self.kept_layers.last().expect("plan keeps at least the ground layer")
    }

    /// Gaps of 1 or 2, starting at 0 and ending at `layers`.
    pub fn is_legal(&self, layers: usize) -> bool {
        self.kept_layers.first() == Some(&0)
            && self.kept_layers.last() == Some(&layers)
            && self.kept_layers.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 2)
    }
}

/// Threshold on `h3 / (h1 a3)` above which horizontal coarsening is done.
pub const HORIZONTAL_THRESHOLD: f64 = 1.0 / 3.0;
/// Threshold on `h3 / (h1 a3)` below which a layer is merged vertically.
pub const VERTICAL_THRESHOLD: f64 = 3.0;

/// Adaptive semicoarsening decision from the bottom spacings `h1` (horizontal)
/// and `h3` (per-layer thickness, ground first).
///
/// With `a1 = a2` normalized to one, the lattice is halved horizontally iff
/// `h3[0] / (h1 a3) > 1/3`. Then, walking up from the ground with `h1`
/// replaced by its coarsened value, the layer above each kept node layer `k`
/// is merged with the next one iff `h3[k] / (h1 a3) < 3`.
pub fn decide_coarsening(
    h1: f64,
    h2: f64,
    h3: &[f64],
    penalty: &PenaltyTensor,
) -> Result<CoarseningPlan> {
    plan_level(h1, h2, h3, vertical_scale(penalty)?, true)
}

/// `a3 / a1`, the vertical weight seen by [`decide_coarsening`].
pub fn vertical_scale(penalty: &PenaltyTensor) -> Result<f64> {
    let [a1, a2, a3] = penalty.coefficients();
    if a1 != a2 {
        return Err(Error::Unsupported(format!(
            "semicoarsening needs a1 = a2, got a1={a1}, a2={a2}"
        )));
    }
    Ok(a3 / a1)
}

/// Vertical weight matching the anisotropy of the assembled operator.
///
/// The stiffness uses `A^{-1}`, so in stretched coordinates a layer of
/// thickness `h3` behaves like one of thickness `h3 a3 / a1`: a large `a3`
/// weakens vertical coupling. This is the reciprocal of [`vertical_scale`].
pub fn operator_vertical_scale(penalty: &PenaltyTensor) -> Result<f64> {
    Ok(1.0 / vertical_scale(penalty)?)
}

/// Plan one level, testing `h3 / (h1 a3)` with `a3` replaced by `scale`.
pub(crate) fn plan_level(
    h1: f64,
    h2: f64,
    h3: &[f64],
    a3: f64,
    horizontal_possible: bool,
) -> Result<CoarseningPlan> {
    if !(a3 > 0.0 && a3.is_finite()) {
        return Err(Error::InvalidArgument(format!("vertical scale must be positive, got {a3}")));
    }
    if !(h1 > 0.0 && h2 > 0.0) || h3.is_empty() || h3.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidArgument(
            "coarsening needs positive spacings and at least one layer".into(),
        ));
    }
    let horizontal = horizontal_possible && h3[0] / (h1 * a3) > HORIZONTAL_THRESHOLD;
    let h1 = if horizontal { 2.0 * h1 } else { h1 };

    let top = h3.len();
    let mut kept_layers = vec![0];
    let mut k = 0;
    while k < top {
        k = if k + 1 < top && h3[k] / (h1 * a3) < VERTICAL_THRESHOLD {
            k + 2
        } else {
            k + 1
        };
        kept_layers.push(k);
    }
    Ok(CoarseningPlan {
        horizontal,
        kept_layers,
    })
}

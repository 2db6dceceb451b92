use crate::error::{Error, Result};
use crate::grid::Dims;

/// Lagrange multiplier values at mesh nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierField {
    dims: Dims,
    values: Vec<f64>,
}

impl MultiplierField {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            values: vec![0.0; dims.len()],
        }
    }

    pub fn from_values(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "node field {dims} needs {} values, got {}",
                dims.len(),
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Right-hand side of the assembled system, one value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsField {
    pub(crate) dims: Dims,
    pub(crate) values: Vec<f64>,
}

impl RhsField {
    pub fn from_values(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "node field {dims} needs {} values, got {}",
                dims.len(),
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Wind vectors at cell centers; `dims` counts cells.
#[derive(Debug, Clone, PartialEq)]
pub struct WindField {
    dims: Dims,
    values: Vec<[f64; 3]>,
}

impl WindField {
    pub fn uniform(dims: Dims, u: [f64; 3]) -> Result<Self> {
        Self::from_values(dims, vec![u; dims.len()])
    }

    pub fn from_values(dims: Dims, values: Vec<[f64; 3]>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "cell field {dims} needs {} vectors, got {}",
                dims.len(),
                values.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            let (i, j, k) = dims.coords(p);
            return Err(Error::InvalidArgument(format!(
                "non-finite wind at cell ({i}, {j}, {k})"
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        self.values[self.dims.idx(i, j, k)]
    }

    /// Largest componentwise difference between two fields of equal shape.
    pub fn max_abs_diff(&self, other: &WindField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| (0..3).map(move |d| (a[d] - b[d]).abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0, |m, c| m.max(c.abs()))
    }
}

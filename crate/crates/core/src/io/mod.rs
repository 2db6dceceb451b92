//! File formats: run configuration, ESRI ASCII terrain, wind cell files,
//! legacy VTK and solve reports.

mod ascii_grid;
mod config;
mod report;
mod vtk;
mod wind;

use std::path::Path;

use crate::error::{Error, Result};

pub use ascii_grid::read_terrain_ascii_grid;
pub use config::{
    config_keys, load_config, parse_config, parse_config_bytes, ConfigEntries, RunConfig, TerrainSource,
    WindSource,
};
pub use report::{format_report, write_report};
pub use vtk::{format_vtk_structured, write_vtk_structured};
pub use wind::{format_wind_cells, node_to_cell_average, read_wind_cells, write_wind_cells};

/// Nine significant digits, shortest exponent form.
pub(crate) fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.8e}")
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

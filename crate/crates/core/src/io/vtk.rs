//! Legacy VTK ASCII structured-grid output.

use std::fmt::Write as _;
use std::path::Path;

use crate::assembly::{MultiplierField, WindField};
use crate::error::{Error, Result};
use crate::mesh::StructuredMesh;

use super::{fmt_sig, write_text};

/// Legacy VTK `STRUCTURED_GRID` text: node coordinates (i fastest), optional
/// `lambda` point scalars and `wind` cell vectors.
pub fn format_vtk_structured(
    mesh: &StructuredMesh,
    wind: Option<&WindField>,
    lambda: Option<&MultiplierField>,
) -> Result<String> {
    let d = mesh.dims();
    let c = mesh.cell_dims();
    if let Some(w) = wind {
        if w.dims() != c {
            return Err(Error::DimensionMismatch(format!("wind has {} cells, mesh has {c}", w.dims())));
        }
    }
    if let Some(l) = lambda {
        if l.dims() != d {
            return Err(Error::DimensionMismatch(format!("lambda has {} nodes, mesh has {d}", l.dims())));
        }
    }
    let mut s = String::with_capacity(64 * d.len() + 256);
    s.push_str("# vtk DataFile Version 3.0\nfemwind\nASCII\nDATASET STRUCTURED_GRID\n");
    let _ = writeln!(s, "DIMENSIONS {} {} {}", d.n1, d.n2, d.n3);
    let _ = writeln!(s, "POINTS {} double", d.len());
    for k in 0..d.n3 {
        for j in 0..d.n2 {
            for i in 0..d.n1 {
                let p = mesh.node(i, j, k);
                let _ = writeln!(s, "{} {} {}", fmt_sig(p[0]), fmt_sig(p[1]), fmt_sig(p[2]));
            }
        }
    }
    if let Some(l) = lambda {
        let _ = writeln!(s, "POINT_DATA {}", d.len());
        s.push_str("SCALARS lambda double 1\nLOOKUP_TABLE default\n");
        for v in l.values() {
            let _ = writeln!(s, "{}", fmt_sig(*v));
        }
    }
    if let Some(w) = wind {
        let _ = writeln!(s, "CELL_DATA {}", c.len());
        s.push_str("VECTORS wind double\n");
        for v in w.values() {
            let _ = writeln!(s, "{} {} {}", fmt_sig(v[0]), fmt_sig(v[1]), fmt_sig(v[2]));
        }
    }
    Ok(s)
}

pub fn write_vtk_structured(
    path: &Path,
    mesh: &StructuredMesh,
    wind: Option<&WindField>,
    lambda: Option<&MultiplierField>,
) -> Result<()> {
    write_text(path, &format_vtk_structured(mesh, wind, lambda)?)
}

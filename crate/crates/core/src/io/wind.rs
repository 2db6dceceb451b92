//! Cell-center wind text files.

use std::fmt::Write as _;
use std::path::Path;

use crate::assembly::WindField;
use crate::error::{Error, Result};
use crate::grid::Dims;

use super::{fmt_sig, write_text};

/// Read `nc1 nc2 nc3` followed by one `u v w` line per cell, `i` fastest.
pub fn read_wind_cells(path: &Path, expected: Dims) -> Result<WindField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_wind_cells(path, &text, expected)
}

pub(crate) fn parse_wind_cells(path: &Path, text: &str, expected: Dims) -> Result<WindField> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file, expected `nc1 nc2 nc3`"))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(path, hl, format!("bad header `{}`", header.trim())))?;
    let [nc1, nc2, nc3] = counts[..] else {
        return Err(Error::parse(path, hl, "header must be `nc1 nc2 nc3`"));
    };
    let got = Dims::new(nc1, nc2, nc3);
    if got != expected {
        return Err(Error::DimensionMismatch(format!(
            "{}: file has {got} cells, mesh expects {expected}",
            path.display()
        )));
    }
    let want = got.len();
    let mut values = Vec::with_capacity(want);
    for (line, raw) in lines {
        if values.len() == want {
            return Err(Error::parse(path, line, format!("more than the declared {want} cell lines")));
        }
        let mut v = [0.0; 3];
        let mut toks = raw.split_whitespace();
        for c in v.iter_mut() {
            let tok = toks
                .next()
                .ok_or_else(|| Error::parse(path, line, "expected three values `u v w`"))?;
            *c = tok
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("bad number `{tok}`")))?;
        }
        if toks.next().is_some() {
            return Err(Error::parse(path, line, "expected three values `u v w`"));
        }
        values.push(v);
    }
    if values.len() != want {
        return Err(Error::DimensionMismatch(format!(
            "{}: expected {want} cell lines, found {}",
            path.display(),
            values.len()
        )));
    }
    WindField::from_values(got, values)
}

/// Format of [`read_wind_cells`], 9 significant digits.
pub fn format_wind_cells(wind: &WindField) -> String {
    let d = wind.dims();
    let mut s = String::with_capacity(48 * d.len() + 32);
    let _ = writeln!(s, "{} {} {}", d.n1, d.n2, d.n3);
    for v in wind.values() {
        let _ = writeln!(s, "{} {} {}", fmt_sig(v[0]), fmt_sig(v[1]), fmt_sig(v[2]));
    }
    s
}

pub fn write_wind_cells(path: &Path, wind: &WindField) -> Result<()> {
    write_text(path, &format_wind_cells(wind))
}

/// Average node vectors (node dims `nodes`, `i` fastest) onto cell centers.
pub fn node_to_cell_average(nodes: Dims, values: &[[f64; 3]]) -> Result<WindField> {
    if values.len() != nodes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} node values for a {nodes} lattice",
            values.len()
        )));
    }
    let c = nodes.cells();
    if c.is_empty() {
        return Err(Error::InvalidArgument(format!("node lattice {nodes} has no cells")));
    }
    let mut out = Vec::with_capacity(c.len());
    for k in 0..c.n3 {
        for j in 0..c.n2 {
            for i in 0..c.n1 {
                let mut acc = [0.0; 3];
                for a in 0..8 {
                    let (di, dj, dk) = crate::grid::vertex_offset(a);
                    let v = values[nodes.idx(i + di, j + dj, k + dk)];
                    for d in 0..3 {
                        acc[d] += 0.125 * v[d];
                    }
                }
                out.push(acc);
            }
        }
    }
    WindField::from_values(c, out)
}

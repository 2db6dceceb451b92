//! ESRI ASCII grid terrain reader.

use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TerrainSurface;

/// Read an ESRI ASCII grid as terrain nodes.
///
/// Each value is one node; the first data row is the northernmost and becomes
/// `j = n2 - 1`. Node `(0, 0)` sits at the center of the lower-left cell
/// (`xllcorner + cellsize / 2`, or `xllcenter` directly). Any `NODATA_value`
/// cell is rejected.
pub fn read_terrain_ascii_grid(path: &Path) -> Result<TerrainSurface> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        let line = 1 + bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count();
        Error::parse(path, line, "invalid UTF-8")
    })?;
    parse_ascii_grid(path, text)
}

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    x: Option<(f64, bool)>,
    y: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

pub(crate) fn parse_ascii_grid(path: &Path, text: &str) -> Result<TerrainSurface> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l)).peekable();
    let mut h = Header::default();

    while let Some(&(line, raw)) = lines.peek() {
        let mut parts = raw.split_whitespace();
        let Some(key) = parts.next() else {
            lines.next();
            continue;
        };
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(path, line, format!("header `{key}` has no value")))?;
        if parts.next().is_some() {
            return Err(Error::parse(path, line, format!("trailing tokens after `{key}`")));
        }
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("bad value `{value}` for `{key}`")))
        };
        let count = || -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, format!("bad count `{value}` for `{key}`")))
        };
        let lower = key.to_ascii_lowercase();
        let slot_taken = match lower.as_str() {
            "ncols" => h.ncols.replace(count()?).is_some(),
            "nrows" => h.nrows.replace(count()?).is_some(),
            "xllcorner" => h.x.replace((num()?, false)).is_some(),
            "xllcenter" => h.x.replace((num()?, true)).is_some(),
            "yllcorner" => h.y.replace((num()?, false)).is_some(),
            "yllcenter" => h.y.replace((num()?, true)).is_some(),
            "cellsize" => h.cellsize.replace(num()?).is_some(),
            "nodata_value" => h.nodata.replace(num()?).is_some(),
            _ => return Err(Error::parse(path, line, format!("unknown header `{key}`"))),
        };
        if slot_taken {
            return Err(Error::parse(path, line, format!("header `{key}` given twice")));
        }
        lines.next();
    }

    let header_line = lines.peek().map_or(text.lines().count(), |(l, _)| *l);
    let missing = |name: &str| Error::parse(path, header_line, format!("missing header `{name}`"));
    let ncols = h.ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = h.nrows.ok_or_else(|| missing("nrows"))?;
    let (x, x_center) = h.x.ok_or_else(|| missing("xllcorner"))?;
    let (y, y_center) = h.y.ok_or_else(|| missing("yllcorner"))?;
    let cellsize = h.cellsize.ok_or_else(|| missing("cellsize"))?;
    if !(cellsize > 0.0) {
        return Err(Error::parse(path, header_line, format!("cellsize must be positive, got {cellsize}")));
    }
    if ncols == 0 || nrows == 0 {
        return Err(Error::parse(path, header_line, "grid has no cells"));
    }

    let mut elevation = vec![0.0; ncols * nrows];
    let mut row = 0;
    let mut last_line = header_line;
    for (line, raw) in lines {
        last_line = line;
        if raw.trim().is_empty() {
            continue;
        }
        if row == nrows {
            return Err(Error::parse(path, line, format!("more than nrows = {nrows} data rows")));
        }
        let j = nrows - 1 - row;
        let mut col = 0;
        for tok in raw.split_whitespace() {
            if col == ncols {
                return Err(Error::parse(
                    path,
                    line,
                    format!("row {row} has more than ncols = {ncols} values"),
                ));
            }
            let v: f64 = tok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("bad elevation `{tok}`")))?;
            if h.nodata == Some(v) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("NODATA at row {row}, column {col} (node i={col}, j={j}); gaps are not supported"),
                ));
            }
            elevation[col + ncols * j] = v;
            col += 1;
        }
        if col != ncols {
            return Err(Error::parse(
                path,
                line,
                format!("row {row} has {col} values, expected ncols = {ncols}"),
            ));
        }
        row += 1;
    }
    if row != nrows {
        return Err(Error::parse(
            path,
            last_line,
            format!("found {row} data rows, expected nrows = {nrows}"),
        ));
    }

    let half = 0.5 * cellsize;
    let origin = (
        if x_center { x } else { x + half },
        if y_center { y } else { y + half },
    );
    TerrainSurface::new(ncols, nrows, cellsize, cellsize, origin, elevation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<TerrainSurface> {
        parse_ascii_grid(Path::new("t.asc"), text)
    }

    #[test]
    fn flat_two_by_two() {
        let t = parse("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n0 0\n0 0\n").unwrap();
        assert_eq!((t.n1(), t.n2(), t.d1(), t.d2()), (2, 2, 30.0, 30.0));
        assert_eq!(t.max_elevation(), 0.0);
        assert_eq!(t.origin(), (15.0, 15.0));
    }

    #[test]
    fn first_row_is_north() {
        let t = parse("NCOLS 3\nNROWS 2\nXLLCENTER 5\nYLLCENTER 7\nCELLSIZE 1\n100 100 100\n0 0 0\n").unwrap();
        assert_eq!(t.elevation(1, 0), 0.0);
        assert_eq!(t.elevation(1, 1), 100.0);
        assert_eq!(t.origin(), (5.0, 7.0));
    }

    #[test]
    fn nodata_names_cell() {
        let err = parse("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 2\n3 -9999\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 1, column 1") && err.contains("i=1, j=0"), "{err}");
        assert!(err.contains(":8:"), "{err}");
    }

    #[test]
    fn short_row_and_missing_rows() {
        let head = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n";
        assert!(parse(&format!("{head}1 2\n3\n")).unwrap_err().to_string().contains("row 1 has 1 values"));
        assert!(parse(&format!("{head}1 2\n")).unwrap_err().to_string().contains("found 1 data rows"));
        assert!(parse(&format!("{head}1 2\n3 4\n5 6\n")).is_err());
        assert!(parse("ncols 2\nnrows 2\n1 2\n3 4\n").unwrap_err().to_string().contains("xllcorner"));
    }
}

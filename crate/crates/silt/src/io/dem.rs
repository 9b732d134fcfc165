//! ESRI ASCII grid reader for digital elevation models (and any other
//! per-cell scalar field, e.g. roughness or absorption maps).
//!
//! Header tokens: ncols, nrows, xllcorner, yllcorner, cellsize, and an
//! optional NODATA_value. Values follow row-major from the northernmost row;
//! rows are flipped on load so index `(i, j)` has `j` increasing northward.

use std::path::Path;

use crate::error::{Result, SiltError};

/// A parsed elevation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DemGrid {
    pub ncols: usize,
    pub nrows: usize,
    pub cellsize: f64,
    pub xllcorner: f64,
    pub yllcorner: f64,
    /// Row-major, south row first.
    pub values: Vec<f64>,
    /// Number of NODATA cells replaced by the fill elevation.
    pub nodata_filled: usize,
}

/// How NODATA cells are treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodataFill {
    /// Replace with `max(valid) + 100` m: an impermeable wall.
    Wall,
    /// Replace with a fixed elevation.
    Constant(f64),
}

impl Default for NodataFill {
    fn default() -> Self {
        NodataFill::Wall
    }
}

pub fn read_dem(path: &Path, fill: NodataFill) -> Result<DemGrid> {
    let text = std::fs::read_to_string(path)?;
    parse_dem(&text, path, fill)
}

fn parse_dem(text: &str, path: &Path, fill: NodataFill) -> Result<DemGrid> {
    let err = |line: usize, msg: String| SiltError::Parse { path: path.to_path_buf(), line, msg };
    let mut ncols: Option<usize> = None;
    let mut nrows: Option<usize> = None;
    let mut xll = 0.0;
    let mut yll = 0.0;
    let mut cellsize: Option<f64> = None;
    let mut nodata: Option<f64> = None;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut in_header = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let first = toks.next().unwrap();
        if in_header && first.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            let key = first.to_ascii_lowercase();
            let val = toks
                .next()
                .ok_or_else(|| err(lineno, format!("header '{key}' has no value")))?;
            if toks.next().is_some() {
                return Err(err(lineno, format!("header '{key}' has trailing tokens")));
            }
            match key.as_str() {
                "ncols" => ncols = Some(parse_usize(val, lineno, path)?),
                "nrows" => nrows = Some(parse_usize(val, lineno, path)?),
                "xllcorner" => xll = parse_f64(val, lineno, path)?,
                "yllcorner" => yll = parse_f64(val, lineno, path)?,
                "cellsize" => cellsize = Some(parse_f64(val, lineno, path)?),
                "nodata_value" => nodata = Some(parse_f64(val, lineno, path)?),
                "dx" | "dy" => {
                    return Err(err(
                        lineno,
                        "dx/dy headers describe non-square cells, which are not supported".into(),
                    ))
                }
                other => return Err(err(lineno, format!("unknown header token '{other}'"))),
            }
            continue;
        }
        in_header = false;
        let ncols = ncols.ok_or_else(|| err(lineno, "data before ncols header".into()))?;
        let mut row = Vec::with_capacity(ncols);
        row.push(parse_f64(first, lineno, path)?);
        for tok in toks {
            row.push(parse_f64(tok, lineno, path)?);
        }
        if row.len() != ncols {
            return Err(err(lineno, format!("row has {} values, expected {ncols}", row.len())));
        }
        rows.push(row);
    }

    let ncols = ncols.ok_or_else(|| err(1, "missing ncols header".into()))?;
    let nrows = nrows.ok_or_else(|| err(1, "missing nrows header".into()))?;
    let cellsize = cellsize.ok_or_else(|| err(1, "missing cellsize header".into()))?;
    if !(cellsize > 0.0) {
        return Err(err(1, format!("cellsize must be positive, got {cellsize}")));
    }
    if rows.len() != nrows {
        return Err(err(1, format!("found {} data rows, expected {nrows}", rows.len())));
    }

    // Flip to south-first ordering.
    let mut values = Vec::with_capacity(ncols * nrows);
    for row in rows.iter().rev() {
        values.extend_from_slice(row);
    }

    // Replace NODATA cells.
    let mut nodata_filled = 0;
    if let Some(nd) = nodata {
        let is_nd = |v: f64| v == nd || (v.is_nan() && nd.is_nan());
        let max_valid = values.iter().cloned().filter(|&v| !is_nd(v)).fold(f64::NEG_INFINITY, f64::max);
        let fill_value = match fill {
            NodataFill::Wall => {
                if max_valid.is_finite() {
                    max_valid + 100.0
                } else {
                    100.0
                }
            }
            NodataFill::Constant(c) => c,
        };
        for v in values.iter_mut() {
            if is_nd(*v) {
                *v = fill_value;
                nodata_filled += 1;
            }
        }
    }

    Ok(DemGrid { ncols, nrows, cellsize, xllcorner: xll, yllcorner: yll, values, nodata_filled })
}

fn parse_usize(tok: &str, line: usize, path: &Path) -> Result<usize> {
    tok.parse().map_err(|_| SiltError::Parse {
        path: path.to_path_buf(),
        line,
        msg: format!("expected an integer, got '{tok}'"),
    })
}

fn parse_f64(tok: &str, line: usize, path: &Path) -> Result<f64> {
    tok.parse().map_err(|_| SiltError::Parse {
        path: path.to_path_buf(),
        line,
        msg: format!("expected a number, got '{tok}'"),
    })
}

//! Copulas given as a table of values on a uniform grid (`u,v,value` CSV).

use std::io::Read;
use std::path::Path;

use super::Copula2D;
use crate::error::{Error, Result};

/// Interpolation scheme recorded on tabulated candidates.
pub const BILINEAR: &str = "bilinear";

const NODE_TOLERANCE: f64 = 1e-9;

/// Node values on a uniform `nu x nv` grid over the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedGrid {
    nu: usize,
    nv: usize,
    values: Vec<f64>,
}

impl TabulatedGrid {
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nv + j]
    }

    /// Bilinear interpolation. Coordinates that land on a node (within
    /// 1e-9 cells) return the stored value unchanged.
    pub fn interpolate(&self, u: f64, v: f64) -> f64 {
        let (i, s) = locate(u, self.nu);
        let (j, t) = locate(v, self.nv);
        let i1 = (i + 1).min(self.nu - 1);
        let j1 = (j + 1).min(self.nv - 1);
        let lo = if t == 0.0 { self.node(i, j) } else { (1.0 - t) * self.node(i, j) + t * self.node(i, j1) };
        if s == 0.0 {
            return lo;
        }
        let hi = if t == 0.0 { self.node(i1, j) } else { (1.0 - t) * self.node(i1, j) + t * self.node(i1, j1) };
        (1.0 - s) * lo + s * hi
    }

    pub fn into_copula(self, name: impl Into<String>) -> Copula2D {
        Copula2D::new(name, move |u, v| self.interpolate(u, v)).with_interpolation(BILINEAR)
    }
}

/// Cell index and fractional offset of `x` on a grid with `m` nodes.
fn locate(x: f64, m: usize) -> (usize, f64) {
    let scaled = x.clamp(0.0, 1.0) * (m - 1) as f64;
    let nearest = scaled.round();
    if (scaled - nearest).abs() <= NODE_TOLERANCE {
        return (nearest as usize, 0.0);
    }
    let i = (scaled.floor() as usize).min(m - 2);
    (i, scaled - i as f64)
}

fn grid_index(x: f64, m: usize) -> Option<usize> {
    let scaled = x * (m - 1) as f64;
    let k = scaled.round();
    ((scaled - k).abs() <= NODE_TOLERANCE * (m - 1) as f64 && k >= 0.0 && k <= (m - 1) as f64)
        .then_some(k as usize)
}

fn distinct_count(mut xs: Vec<f64>) -> usize {
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= NODE_TOLERANCE);
    xs.len()
}

/// Parses a `u,v,value` table. Every node of a uniform grid (endpoints 0
/// and 1 included) must appear exactly once; row order is free.
pub fn parse_tabulated<R: Read>(reader: R) -> Result<TabulatedGrid> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    let names: Vec<&str> = headers.iter().collect();
    if names != ["u", "v", "value"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header 'u,v,value', found '{}'", names.join(",")),
        });
    }

    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let mut parsed = [0.0; 3];
        for (slot, field) in parsed.iter_mut().zip(record.iter()) {
            *slot = field.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                Error::Parse { line, message: format!("'{field}' is not a finite number") }
            })?;
        }
        rows.push((line, parsed));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 2, message: "table has no rows".into() });
    }

    let nu = distinct_count(rows.iter().map(|(_, r)| r[0]).collect());
    let nv = distinct_count(rows.iter().map(|(_, r)| r[1]).collect());
    if nu < 2 || nv < 2 {
        return Err(Error::Parse {
            line: rows[0].0,
            message: format!("grid needs at least 2 nodes per axis, found {nu} x {nv}"),
        });
    }

    let mut values = vec![None; nu * nv];
    for &(line, [u, v, value]) in &rows {
        let (Some(i), Some(j)) = (grid_index(u, nu), grid_index(v, nv)) else {
            return Err(Error::Parse {
                line,
                message: format!("({u}, {v}) is not a node of a uniform {nu} x {nv} grid on [0,1]^2"),
            });
        };
        let slot = &mut values[i * nv + j];
        if slot.is_some() {
            return Err(Error::Parse { line, message: format!("duplicate node ({u}, {v})") });
        }
        *slot = Some(value);
    }
    if let Some(k) = values.iter().position(Option::is_none) {
        let last = rows.last().map_or(1, |r| r.0);
        return Err(Error::Parse {
            line: last,
            message: format!(
                "incomplete grid: node ({}, {}) missing",
                (k / nv) as f64 / (nu - 1) as f64,
                (k % nv) as f64 / (nv - 1) as f64
            ),
        });
    }
    Ok(TabulatedGrid { nu, nv, values: values.into_iter().flatten().collect() })
}

pub fn load_tabulated_csv(path: &Path) -> Result<Copula2D> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map_or_else(|| "table".into(), |s| s.to_string_lossy().into_owned());
    Ok(parse_tabulated(file)?.into_copula(name))
}

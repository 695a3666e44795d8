use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Paired observations `(x_i, y_i)`, all finite, at least one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn column_name(header: Option<&[String]>, k: usize) -> String {
    match header {
        Some(h) if h.len() > k => format!("column {} ('{}')", k + 1, h[k]),
        _ => format!("column {} ({})", k + 1, ["x", "y"][k]),
    }
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Argument(format!(
                "coordinate lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::Argument("sample is empty".into()));
        }
        if let Some(i) = x.iter().zip(&y).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::Argument(format!(
                "pair {i} is not finite: ({}, {})",
                x[i], y[i]
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (x, y) = pairs.iter().copied().unzip();
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// The sample with coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self { x: self.y.clone(), y: self.x.clone() }
    }

    /// Reads a two-column CSV. A first row that does not parse as two
    /// numbers is treated as a header.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut header: Option<Vec<String>> = None;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (idx, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(idx + 1, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(idx + 1, |p| p.line() as usize);
            if idx == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
                header = Some(record.iter().map(str::to_string).collect());
                let column_name = |k| column_name(header.as_deref(), k);
                if record.len() < 2 {
                    return Err(Error::Parse { line, message: format!("missing {}", column_name(1)) });
                }
                if record.len() > 2 {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected 2 columns, found {}", record.len()),
                    });
                }
                continue;
            }
            if record.len() > 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 columns, found {}", record.len()),
                });
            }
            let column_name = |k| column_name(header.as_deref(), k);
            let mut pair = [0.0; 2];
            for (k, slot) in pair.iter_mut().enumerate() {
                let field = record.get(k).filter(|f| !f.is_empty()).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("missing {}", column_name(k)),
                })?;
                *slot = field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::Parse {
                        line,
                        message: format!("{}: '{field}' is not a finite number", column_name(k)),
                    }
                })?;
            }
            x.push(pair[0]);
            y.push(pair[1]);
        }
        if x.is_empty() {
            return Err(Error::Parse { line: 1, message: "no data rows".into() });
        }
        Self::new(x, y)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }
}

//! Univariate transforms applied component-wise to samples.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Sample;

/// Strictly increasing piecewise-linear map through `(xs[k], ys[k])`,
/// extended linearly beyond the first and last knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<RawTable> for MonotoneTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        MonotoneTable::new(raw.xs, raw.ys)
    }
}

impl From<MonotoneTable> for RawTable {
    fn from(t: MonotoneTable) -> Self {
        RawTable { xs: t.xs, ys: t.ys }
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

impl MonotoneTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Parameter(format!(
                "monotone table needs matching knot lists of length >= 2, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        if !strictly_increasing(&xs) {
            return Err(Error::Parameter(format!("table breakpoints {xs:?} are not strictly increasing")));
        }
        if !strictly_increasing(&ys) {
            return Err(Error::Parameter(format!("table values {ys:?} are not strictly increasing")));
        }
        Ok(Self { xs, ys })
    }

    pub fn knots(&self) -> usize {
        self.xs.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 2;
        let k = self.xs.partition_point(|&b| b <= x).saturating_sub(1).min(last);
        let slope = (self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k]);
        self.ys[k] + (x - self.xs[k]) * slope
    }
}

/// A named transform `φ` applied to one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformSpec {
    Affine { a: f64, b: f64 },
    Power { p: f64 },
    Exp,
    Negate,
    MonotoneTable(MonotoneTable),
}

impl TransformSpec {
    pub fn identity() -> Self {
        TransformSpec::Affine { a: 1.0, b: 0.0 }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let y = match self {
            TransformSpec::Affine { a, b } => a * x + b,
            TransformSpec::Power { p } => {
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    x.powi(*p as i32)
                } else if x < 0.0 {
                    return Err(Error::Domain(format!(
                        "{self} is undefined at negative input {x}"
                    )));
                } else {
                    x.powf(*p)
                }
            }
            TransformSpec::Exp => x.exp(),
            TransformSpec::Negate => -x,
            TransformSpec::MonotoneTable(t) => t.eval(x),
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain(format!("{self} produced {y} at input {x}")))
        }
    }

    /// `(slope, intercept)` when the transform is affine.
    pub fn affine_coefficients(&self) -> Option<(f64, f64)> {
        match self {
            TransformSpec::Affine { a, b } => Some((*a, *b)),
            TransformSpec::Negate => Some((-1.0, 0.0)),
            TransformSpec::Power { p } if *p == 1.0 => Some((1.0, 0.0)),
            _ => None,
        }
    }

    /// Whether the transform is strictly increasing on `[lo, hi]`, decided
    /// from its closed form.
    pub fn is_strictly_increasing_on(&self, lo: f64, hi: f64) -> bool {
        match self {
            TransformSpec::Affine { a, .. } => *a > 0.0,
            TransformSpec::Exp | TransformSpec::MonotoneTable(_) => true,
            TransformSpec::Negate => false,
            TransformSpec::Power { p } => {
                let odd_integer = p.fract() == 0.0 && p.rem_euclid(2.0) == 1.0;
                *p > 0.0 && (odd_integer || lo >= 0.0) && lo <= hi
            }
        }
    }

    /// Whether the transform is strictly decreasing on `[lo, hi]`.
    pub fn is_strictly_decreasing_on(&self, lo: f64, hi: f64) -> bool {
        match self {
            TransformSpec::Affine { a, .. } => *a < 0.0,
            TransformSpec::Negate => true,
            TransformSpec::Power { p } => {
                let even_integer = p.fract() == 0.0 && p.rem_euclid(2.0) == 0.0;
                *p > 0.0 && even_integer && hi <= 0.0 && lo <= hi
            }
            _ => false,
        }
    }

    /// Even integer powers are not monotone on a support that changes sign.
    pub fn is_nonmonotone_on(&self, lo: f64, hi: f64) -> bool {
        !self.is_strictly_increasing_on(lo, hi) && !self.is_strictly_decreasing_on(lo, hi)
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::Affine { a, b } => write!(f, "affine({a},{b})"),
            TransformSpec::Power { p } => write!(f, "power({p})"),
            TransformSpec::Exp => f.write_str("exp"),
            TransformSpec::Negate => f.write_str("negate"),
            TransformSpec::MonotoneTable(t) => write!(f, "monotone_table({} knots)", t.knots()),
        }
    }
}

/// `{(φ(x_i), ψ(y_i))}` in the original order.
pub fn apply_transform(s: &Sample, tx: &TransformSpec, ty: &TransformSpec) -> Result<Sample> {
    let map = |values: &[f64], t: &TransformSpec, coord: &str| -> Result<Vec<f64>> {
        values
            .iter()
            .enumerate()
            .map(|(row, &v)| {
                t.eval(v).map_err(|e| Error::Domain(format!("row {row}, {coord} coordinate: {e}")))
            })
            .collect()
    };
    Sample::new(map(s.x(), tx, "x")?, map(s.y(), ty, "y")?)
}

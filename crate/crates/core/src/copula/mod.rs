//! Bivariate candidate copulas and grid-based verification of the copula
//! axioms.
//!
//! A [`Copula2D`] is only a *candidate*: an evaluable function on the unit
//! square. Whether it actually is a copula is decided by the checks in
//! [`verify`].

mod builtins;
pub mod sklar;
pub mod tabulated;
pub mod verify;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtins::{builtin_by_name, builtin_copulas, BUILTIN_NAMES};
pub use sklar::{sklar_join, JointCdf, MarginalCdf};
pub use verify::{
    check_boundary, check_componentwise_monotone, check_lipschitz,
    check_partial_difference_monotone, check_two_increasing, check_two_increasing_with, h_volume,
    verify_copula, verify_copula_with, Enumeration, VerificationReport, Witness,
};

/// Values this close outside `[0, 1]` are clamped onto the boundary.
pub const SNAP_TOLERANCE: f64 = 1e-12;

/// Clamps `x` onto `[0, 1]` when it lies within `snap` of the interval,
/// rejects it otherwise.
pub fn snap_unit(x: f64, snap: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("{x} is not a finite coordinate")));
    }
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else if x < 0.0 && x >= -snap {
        Ok(0.0)
    } else if x > 1.0 && x <= 1.0 + snap {
        Ok(1.0)
    } else {
        Err(Error::Domain(format!("{x} lies outside [0, 1]")))
    }
}

/// A point of the closed unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPoint {
    pub u: f64,
    pub v: f64,
}

impl UnitPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        Self::with_snap(u, v, SNAP_TOLERANCE)
    }

    pub fn with_snap(u: f64, v: f64, snap: f64) -> Result<Self> {
        Ok(Self {
            u: snap_unit(u, snap)?,
            v: snap_unit(v, snap)?,
        })
    }
}

/// Axis-aligned rectangle `[u1, u2] x [v1, v2]` inside the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl Rectangle {
    pub fn new(u1: f64, u2: f64, v1: f64, v2: f64) -> Result<Self> {
        let lo = UnitPoint::new(u1, v1)?;
        let hi = UnitPoint::new(u2, v2)?;
        if lo.u > hi.u || lo.v > hi.v {
            return Err(Error::Argument(format!(
                "rectangle corners out of order: [{u1}, {u2}] x [{v1}, {v2}]"
            )));
        }
        Ok(Self {
            u1: lo.u,
            u2: hi.u,
            v1: lo.v,
            v2: hi.v,
        })
    }

    pub fn unit_square() -> Self {
        Self {
            u1: 0.0,
            u2: 1.0,
            v1: 0.0,
            v2: 1.0,
        }
    }

    pub fn contains(&self, p: UnitPoint) -> bool {
        (self.u1..=self.u2).contains(&p.u) && (self.v1..=self.v2).contains(&p.v)
    }
}

/// Uniform discretisation of `[0, 1]` with `n` points per axis, endpoints
/// included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!("grid needs at least 2 points per axis, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `k`-th grid coordinate, `k / (n - 1)`.
    ///
    /// Nested grids (`n` and `2n - 1`) produce bit-identical shared nodes
    /// because both quotients are correctly rounded images of the same
    /// rational.
    pub fn coord(&self, k: usize) -> f64 {
        k as f64 / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.coord(k)).collect()
    }
}

pub type EvalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Named bivariate function on the unit square, a candidate copula.
#[derive(Clone)]
pub struct Copula2D {
    name: String,
    params: Vec<(String, f64)>,
    is_copula_claim: bool,
    interpolation: Option<String>,
    eval: EvalFn,
}

impl Copula2D {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params: Vec::new(),
            is_copula_claim: true,
            interpolation: None,
            eval: Arc::new(eval),
        }
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.push((name.into(), value));
        self
    }

    /// Marks the function as a known non-copula (a counterexample), so a
    /// failing verification is the expected outcome.
    pub fn counterexample(mut self) -> Self {
        self.is_copula_claim = false;
        self
    }

    pub fn with_interpolation(mut self, scheme: impl Into<String>) -> Self {
        self.interpolation = Some(scheme.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn is_copula_claim(&self) -> bool {
        self.is_copula_claim
    }

    pub fn interpolation(&self) -> Option<&str> {
        self.interpolation.as_deref()
    }

    pub fn eval(&self, p: UnitPoint) -> f64 {
        (self.eval)(p.u, p.v)
    }

    /// Evaluates without re-validating the coordinates. Callers guarantee
    /// `(u, v)` lies in the unit square.
    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        (self.eval)(u, v)
    }

    /// Evaluates at `(u, v)` after validating (and snapping) the point.
    pub fn eval_at(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.eval(UnitPoint::new(u, v)?))
    }
}

impl fmt::Debug for Copula2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Copula2D")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("is_copula_claim", &self.is_copula_claim)
            .finish_non_exhaustive()
    }
}

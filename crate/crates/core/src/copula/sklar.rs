//! Joining a copula with marginal distribution functions.

use std::fmt;
use std::sync::Arc;

use super::{snap_unit, Copula2D, UnitPoint, SNAP_TOLERANCE};
use crate::error::{Error, Result};

/// Univariate distribution function with its declared support. No inverse
/// is provided.
#[derive(Clone)]
pub struct MarginalCdf {
    support: (f64, f64),
    cdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MarginalCdf {
    pub fn new<F>(support: (f64, f64), cdf: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if support.0.is_nan() || support.1.is_nan() || support.0 > support.1 {
            return Err(Error::Argument(format!("invalid support {support:?}")));
        }
        Ok(Self { support, cdf: Arc::new(cdf) })
    }

    /// The identity distribution function of the uniform law on `[0, 1]`.
    pub fn uniform() -> Self {
        Self {
            support: (0.0, 1.0),
            cdf: Arc::new(|x: f64| x.clamp(0.0, 1.0)),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// `F(x)`, validated to lie in `[0, 1]` up to the snap tolerance.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let p = (self.cdf)(x);
        snap_unit(p, SNAP_TOLERANCE)
            .map_err(|_| Error::Domain(format!("marginal CDF returned {p} at x = {x}")))
    }
}

impl fmt::Debug for MarginalCdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarginalCdf").field("support", &self.support).finish_non_exhaustive()
    }
}

/// `H(x, y) = C(F(x), G(y))`.
#[derive(Debug, Clone)]
pub struct JointCdf {
    copula: Copula2D,
    f: MarginalCdf,
    g: MarginalCdf,
}

impl JointCdf {
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let p = UnitPoint::new(self.f.eval(x)?, self.g.eval(y)?)?;
        Ok(self.copula.eval(p))
    }

    pub fn copula(&self) -> &Copula2D {
        &self.copula
    }
}

pub fn sklar_join(c: Copula2D, f: MarginalCdf, g: MarginalCdf) -> JointCdf {
    JointCdf { copula: c, f, g }
}

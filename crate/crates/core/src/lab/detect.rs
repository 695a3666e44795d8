//! Probe-based detectors for monotone and affine maps.

use serde::Serialize;

use super::transform::TransformSpec;
use crate::error::{Error, Result};

/// Number of probes placed by [`uniform_probes`] callers by default.
pub const DEFAULT_PROBES: usize = 33;

/// Anything that can be evaluated at a real point: a [`TransformSpec`] or a
/// plain closure.
pub trait Univariate {
    fn apply(&self, x: f64) -> Result<f64>;
}

impl Univariate for TransformSpec {
    fn apply(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }
}

impl<F: Fn(f64) -> f64> Univariate for F {
    fn apply(&self, x: f64) -> Result<f64> {
        let y = self(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain(format!("function returned {y} at {x}")))
        }
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform_probes(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 3 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Argument(format!(
            "need at least 3 probes over a nonempty finite interval, got {count} over [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|k| if k == count - 1 { hi } else { lo + step * k as f64 }).collect())
}

fn check_probes(probes: &[f64]) -> Result<()> {
    if probes.len() < 3 {
        return Err(Error::Argument(format!("need at least 3 probes, got {}", probes.len())));
    }
    if let Some(k) = probes.windows(2).position(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1]) {
        return Err(Error::Argument(format!(
            "probes must be strictly increasing; probe {} ({}) >= probe {} ({})",
            k,
            probes[k],
            k + 1,
            probes[k + 1]
        )));
    }
    if probes.iter().any(|p| !p.is_finite()) {
        return Err(Error::Argument("probes must be finite".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityVerdict {
    StrictlyIncreasing,
    Nondecreasing,
    Nonmonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub verdict: MonotonicityVerdict,
    /// First adjacent probe pair that is decreasing (for `nonmonotone`) or
    /// flat (for `nondecreasing`).
    pub witness: Option<(f64, f64)>,
}

pub fn detect_monotone<T: Univariate + ?Sized>(t: &T, probes: &[f64]) -> Result<MonotonicityReport> {
    check_probes(probes)?;
    let values = probes.iter().map(|&p| t.apply(p)).collect::<Result<Vec<_>>>()?;
    let mut flat = None;
    for k in 0..values.len() - 1 {
        if values[k + 1] < values[k] {
            return Ok(MonotonicityReport {
                verdict: MonotonicityVerdict::Nonmonotone,
                witness: Some((probes[k], probes[k + 1])),
            });
        }
        if values[k + 1] == values[k] && flat.is_none() {
            flat = Some((probes[k], probes[k + 1]));
        }
    }
    Ok(match flat {
        Some(w) => MonotonicityReport { verdict: MonotonicityVerdict::Nondecreasing, witness: Some(w) },
        None => MonotonicityReport { verdict: MonotonicityVerdict::StrictlyIncreasing, witness: None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffinityReport {
    pub is_affine: bool,
    pub max_second_difference: f64,
    pub tolerance: f64,
    /// Least-squares fit `slope * p + intercept` over the probes.
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Second difference at the middle of three probes, scaled so that on
/// equally spaced probes it is exactly `f(p+) - 2 f(p) + f(p-)`:
/// `2 (h_l (f+ - f) - h_r (f - f-)) / (h_l + h_r)`.
fn second_difference(p: [f64; 3], f: [f64; 3]) -> f64 {
    let (hl, hr) = (p[1] - p[0], p[2] - p[1]);
    if hl == hr {
        f[2] - 2.0 * f[1] + f[0]
    } else {
        2.0 * (hl * (f[2] - f[1]) - hr * (f[1] - f[0])) / (hl + hr)
    }
}

pub fn detect_affine<T: Univariate + ?Sized>(t: &T, probes: &[f64], tol: f64) -> Result<AffinityReport> {
    check_probes(probes)?;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Argument(format!("tolerance must be nonnegative, got {tol}")));
    }
    let values = probes.iter().map(|&p| t.apply(p)).collect::<Result<Vec<_>>>()?;
    let max_second_difference = (1..probes.len() - 1)
        .map(|k| {
            second_difference(
                [probes[k - 1], probes[k], probes[k + 1]],
                [values[k - 1], values[k], values[k + 1]],
            )
            .abs()
        })
        .fold(0.0, f64::max);

    let n = probes.len() as f64;
    let mp = probes.iter().sum::<f64>() / n;
    let mf = values.iter().sum::<f64>() / n;
    let (mut spf, mut spp) = (0.0, 0.0);
    for (p, f) in probes.iter().zip(&values) {
        spf += (p - mp) * (f - mf);
        spp += (p - mp) * (p - mp);
    }
    let slope = spf / spp;
    let intercept = mf - slope * mp;
    let max_residual = probes
        .iter()
        .zip(&values)
        .map(|(p, f)| (f - (slope * p + intercept)).abs())
        .fold(0.0, f64::max);

    Ok(AffinityReport {
        is_affine: max_second_difference <= tol,
        max_second_difference,
        tolerance: tol,
        slope,
        intercept,
        max_residual,
    })
}

use serde::{Deserialize, Serialize};

use super::rank::ranks;
use super::Sample;
use crate::error::{Error, Result};

fn require_pairs(s: &Sample) -> Result<usize> {
    match s.len() {
        n if n >= 2 => Ok(n),
        n => Err(Error::Argument(format!("need at least 2 pairs, got {n}"))),
    }
}

fn sgn(a: f64, b: f64) -> i64 {
    // operands are finite, so partial_cmp always succeeds
    match b.partial_cmp(&a) {
        Some(std::cmp::Ordering::Greater) => 1,
        Some(std::cmp::Ordering::Less) => -1,
        _ => 0,
    }
}

/// `2/(n(n-1)) Σ_{i<j} sgn(x_j - x_i) sgn(y_j - y_i)`, evaluated over all
/// pairs. The sign sum is accumulated exactly in integers.
pub fn kendall_tau(s: &Sample) -> Result<f64> {
    let n = require_pairs(s)?;
    let (x, y) = (s.x(), s.y());
    let mut sum: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            sum += sgn(x[i], x[j]) * sgn(y[i], y[j]);
        }
    }
    Ok(2.0 * sum as f64 / (n * (n - 1)) as f64)
}

/// Spearman's rho. Without ties this is `1 - 6 Σ d² / (n(n² - 1))`; with
/// ties in either coordinate it is the Pearson correlation of the average
/// ranks (see [`DependenceReport::tie_adjusted`]).
pub fn spearman_rho(s: &Sample) -> Result<f64> {
    let n = require_pairs(s)?;
    let rx = ranks(s.x())?;
    let ry = ranks(s.y())?;
    if rx.has_ties() || ry.has_ties() {
        return pearson_slices(rx.as_slice(), ry.as_slice());
    }
    let d2: f64 = rx.as_slice().iter().zip(ry.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
    let nf = n as f64;
    let denom = nf * (nf * nf - 1.0);
    // (denom - 6Σd²) / denom: numerator and denominator are exact integers,
    // so reversing one ranking negates the result bit-for-bit.
    Ok((denom - 6.0 * d2) / denom)
}

/// Pearson correlation with population normalisation (`1/n` in both the
/// covariance and the standard deviations, so it cancels).
pub fn pearson_rho(s: &Sample) -> Result<f64> {
    require_pairs(s)?;
    pearson_slices(s.x(), s.y())
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

fn pearson_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    if is_constant(x) || is_constant(y) {
        return Err(Error::DegenerateSample(format!(
            "zero variance in the {} coordinate",
            if is_constant(x) { "x" } else { "y" }
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let cov = sxy / n;
    Ok(cov / ((sxx / n).sqrt() * (syy / n).sqrt()))
}

/// The three coefficients of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub pearson_rho: f64,
    pub n: usize,
    /// Spearman fell back to the rank-Pearson form because of ties.
    pub tie_adjusted: bool,
}

pub fn dependence_report(s: &Sample) -> Result<DependenceReport> {
    let tie_adjusted = ranks(s.x())?.has_ties() || ranks(s.y())?.has_ties();
    Ok(DependenceReport {
        kendall_tau: kendall_tau(s)?,
        spearman_rho: spearman_rho(s)?,
        pearson_rho: pearson_rho(s)?,
        n: s.len(),
        tie_adjusted,
    })
}

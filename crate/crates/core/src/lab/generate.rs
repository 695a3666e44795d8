//! Seeded bivariate sample generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Sample;

/// Name recorded in reports for the generator behind every experiment.
pub const GENERATOR_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    /// Standard normal margins with correlation `rho`, `|rho| < 1`.
    BivariateNormal { rho: f64 },
    /// Independent uniforms on the unit square.
    UniformSquare,
    /// FGM copula with uniform margins, `|theta| <= 1`.
    Fgm { theta: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::BivariateNormal { rho } if rho.is_nan() || rho.abs() >= 1.0 => Err(Error::Config(
                format!("distribution.rho must satisfy |rho| < 1, got {rho}"),
            )),
            Distribution::Fgm { theta } if theta.is_nan() || theta.abs() > 1.0 => Err(Error::Config(format!(
                "distribution.theta must satisfy |theta| <= 1, got {theta}"
            ))),
            _ => Ok(()),
        }
    }

    /// Draws `n` pairs.
    ///
    /// * normal: `x = z1`, `y = rho z1 + sqrt(1 - rho²) z2`;
    /// * FGM: conditional inversion of `∂C/∂u (u, v) = w`, i.e. the root in
    ///   `[0, 1]` of `A v² - (1 + A) v + w = 0` with `A = θ(1 - 2u)`, taken
    ///   in the cancellation-free form `2w / (1 + A + sqrt((1 + A)² - 4Aw))`.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        self.validate()?;
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        match *self {
            Distribution::BivariateNormal { rho } => {
                let mix = (1.0 - rho * rho).sqrt();
                for _ in 0..n {
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    x.push(z1);
                    y.push(rho * z1 + mix * z2);
                }
            }
            Distribution::UniformSquare => {
                for _ in 0..n {
                    x.push(rng.random::<f64>());
                    y.push(rng.random::<f64>());
                }
            }
            Distribution::Fgm { theta } => {
                for _ in 0..n {
                    let u: f64 = rng.random();
                    let w: f64 = rng.random();
                    let a = theta * (1.0 - 2.0 * u);
                    let disc = ((1.0 + a) * (1.0 + a) - 4.0 * a * w).max(0.0);
                    x.push(u);
                    y.push(2.0 * w / (1.0 + a + disc.sqrt()));
                }
            }
        }
        Sample::new(x, y)
    }
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn experiment_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

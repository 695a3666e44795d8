use super::Copula2D;
use crate::error::{Error, Result};

/// CLI names of the built-in functions, in registration order.
pub const BUILTIN_NAMES: [&str; 6] = [
    "independence",
    "min-copula",
    "w-copula",
    "fgm",
    "fgm-counterexample-factor",
    "max-counterexample",
];

impl Copula2D {
    /// Product copula `uv`.
    pub fn independence() -> Self {
        Copula2D::new("independence", |u, v| u * v)
    }

    /// Upper Fréchet bound `min(u, v)`.
    pub fn min_copula() -> Self {
        Copula2D::new("min-copula", f64::min)
    }

    /// Lower Fréchet bound `max(u + v - 1, 0)`.
    pub fn w_copula() -> Self {
        Copula2D::new("w-copula", |u, v| (u + v - 1.0).max(0.0))
    }

    /// Farlie-Gumbel-Morgenstern copula `uv(1 + θ(1-u)(1-v))`, `θ ∈ [-1, 1]`.
    pub fn fgm(theta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta) {
            return Err(Error::Parameter(format!("FGM theta must lie in [-1, 1], got {theta}")));
        }
        Ok(
            Copula2D::new("fgm", move |u, v| u * v * (1.0 + theta * (1.0 - u) * (1.0 - v)))
                .with_param("theta", theta),
        )
    }

    /// `(2a - 1)(2b - 1)`: 2-increasing, yet decreasing in each argument on
    /// part of the square.
    pub fn fgm_counterexample_factor() -> Self {
        Copula2D::new("fgm-counterexample-factor", |a, b| (2.0 * a - 1.0) * (2.0 * b - 1.0))
            .counterexample()
    }

    /// `max(a, b)`: nondecreasing in each argument, not 2-increasing.
    pub fn max_counterexample() -> Self {
        Copula2D::new("max-counterexample", f64::max).counterexample()
    }
}

/// Π, M, W, FGM(θ) and the two counterexamples, in [`BUILTIN_NAMES`] order.
pub fn builtin_copulas(theta: f64) -> Result<Vec<Copula2D>> {
    Ok(vec![
        Copula2D::independence(),
        Copula2D::min_copula(),
        Copula2D::w_copula(),
        Copula2D::fgm(theta)?,
        Copula2D::fgm_counterexample_factor(),
        Copula2D::max_counterexample(),
    ])
}

pub fn builtin_by_name(name: &str, theta: f64) -> Result<Copula2D> {
    match name {
        "independence" => Ok(Copula2D::independence()),
        "min-copula" => Ok(Copula2D::min_copula()),
        "w-copula" => Ok(Copula2D::w_copula()),
        "fgm" => Copula2D::fgm(theta),
        "fgm-counterexample-factor" => Ok(Copula2D::fgm_counterexample_factor()),
        "max-counterexample" => Ok(Copula2D::max_counterexample()),
        other => Err(Error::Argument(format!(
            "unknown builtin '{other}'; known builtins: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fgm_zero_is_independence() {
        let fgm = Copula2D::fgm(0.0).unwrap();
        let pi = Copula2D::independence();
        for i in 0..=20 {
            for j in 0..=20 {
                let (u, v) = (i as f64 / 20.0, j as f64 / 20.0);
                assert_eq!(fgm.value(u, v), pi.value(u, v));
            }
        }
    }

    #[test]
    fn spot_values() {
        // 0.25 * (1 + 0.25)
        assert_eq!(Copula2D::fgm(1.0).unwrap().value(0.5, 0.5), 0.3125);
        assert_eq!(Copula2D::w_copula().value(0.3, 0.4), 0.0);
        assert_eq!(Copula2D::min_copula().value(0.3, 0.4), 0.3);
    }

    #[test]
    fn fgm_rejects_out_of_range_theta() {
        assert!(matches!(Copula2D::fgm(1.5), Err(Error::Parameter(_))));
        assert!(Copula2D::fgm(f64::NAN).is_err());
    }

    #[test]
    fn registry_matches_names() {
        let all = builtin_copulas(0.3).unwrap();
        let names: Vec<_> = all.iter().map(|c| c.name().to_string()).collect();
        assert_eq!(names, BUILTIN_NAMES);
        for name in BUILTIN_NAMES {
            assert_eq!(builtin_by_name(name, 0.3).unwrap().name(), name);
        }
        let err = builtin_by_name("gumbel", 0.0).unwrap_err().to_string();
        assert!(err.contains("independence") && err.contains("max-counterexample"));
        assert!(!Copula2D::max_counterexample().is_copula_claim());
        assert!(Copula2D::w_copula().is_copula_claim());
    }
}

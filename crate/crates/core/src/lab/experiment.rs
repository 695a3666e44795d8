//! Invariance and breakage experiments over generated samples.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::detect::{detect_monotone, uniform_probes, MonotonicityReport, DEFAULT_PROBES};
use super::generate::{experiment_rng, Distribution, GENERATOR_NAME};
use super::transform::{apply_transform, TransformSpec};
use crate::error::{Error, Result};
use crate::stats::{empirical_copula, empirical_copula_distance, kendall_tau, pearson_rho, spearman_rho, Sample};

/// Tolerance for relations that hold algebraically but not bit-exactly.
pub const FLOAT_RELATION_TOL: f64 = 1e-12;
/// Breakage results must land within this many Monte Carlo standard errors.
pub const BREAKAGE_SIGMAS: f64 = 3.0;
/// Batches used to estimate the standard error of a single repetition.
pub const BREAKAGE_BATCHES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Empirical copula distance, Kendall and Spearman before/after.
    #[default]
    CopulaInvariance,
    /// Pearson before/after under affine transforms.
    PearsonInvariance,
    /// Pearson under squaring of correlated normals, against `rho²`.
    PearsonBreakage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformPair {
    pub x: TransformSpec,
    pub y: TransformSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub n_samples: usize,
    pub distribution: Distribution,
    pub transforms: TransformPair,
    pub repetitions: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 10 {
            return Err(Error::Config(format!("n_samples must be >= 10, got {}", self.n_samples)));
        }
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be >= 1, got 0".into()));
        }
        self.distribution.validate()?;
        match self.experiment {
            ExperimentKind::CopulaInvariance => Ok(()),
            ExperimentKind::PearsonInvariance => {
                for (name, t) in [("x", &self.transforms.x), ("y", &self.transforms.y)] {
                    match t.affine_coefficients() {
                        Some((a, _)) if a != 0.0 => {}
                        Some(_) => {
                            return Err(Error::DegenerateTransform(format!(
                                "transforms.{name} has zero slope"
                            )))
                        }
                        None => {
                            return Err(Error::Config(format!(
                                "transforms.{name} must be affine for pearson_invariance, got {t}"
                            )))
                        }
                    }
                }
                Ok(())
            }
            ExperimentKind::PearsonBreakage => {
                match self.distribution {
                    Distribution::BivariateNormal { rho } if rho != 0.0 => {}
                    Distribution::BivariateNormal { .. } => {
                        return Err(Error::Config(
                            "distribution.rho must be nonzero for pearson_breakage".into(),
                        ))
                    }
                    _ => {
                        return Err(Error::Config(
                            "distribution must be bivariate_normal for pearson_breakage".into(),
                        ))
                    }
                }
                let square = TransformSpec::Power { p: 2.0 };
                if self.transforms.x != square || self.transforms.y != square {
                    return Err(Error::Config(
                        "transforms must be (power(2), power(2)) for pearson_breakage".into(),
                    ));
                }
                if self.repetitions == 1 && self.n_samples < 10 * BREAKAGE_BATCHES {
                    return Err(Error::Config(format!(
                        "pearson_breakage with one repetition needs n_samples >= {}",
                        10 * BREAKAGE_BATCHES
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Relation the experiment claims between `before` and `after`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Preserved,
    SignFlipped,
    /// No claim; the values are recorded for observation only.
    Unconstrained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceResult {
    pub statistic_name: String,
    pub repetition: usize,
    pub before: f64,
    pub after: f64,
    pub abs_delta: f64,
    /// The invariance is a rank identity: `abs_delta` must be exactly 0.
    pub exact_expected: bool,
    pub expected_relation: Relation,
    /// Tolerance at which `expected_relation` is asserted (0 = bit-exact).
    pub relation_tolerance: f64,
    pub held: bool,
}

impl InvarianceResult {
    fn new(name: &str, repetition: usize, before: f64, after: f64, relation: Relation, tol: f64) -> Self {
        let held = match relation {
            Relation::Preserved if tol == 0.0 => before == after,
            Relation::Preserved => (before - after).abs() <= tol,
            Relation::SignFlipped if tol == 0.0 => after == -before,
            Relation::SignFlipped => (after + before).abs() <= tol,
            Relation::Unconstrained => true,
        };
        Self {
            statistic_name: name.to_string(),
            repetition,
            before,
            after,
            abs_delta: (before - after).abs(),
            exact_expected: relation == Relation::Preserved && tol == 0.0,
            expected_relation: relation,
            relation_tolerance: tol,
            held,
        }
    }
}

/// Outcome of the squaring experiment against the closed form
/// `corr(X², Y²) = rho²` for standard bivariate normals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakageSummary {
    pub rho: f64,
    pub mean_before: f64,
    pub mean_after: f64,
    pub expected_after: f64,
    pub standard_error: f64,
    pub sigmas: f64,
    pub within_tolerance: bool,
    /// `|rho - rho²|`: how far squaring moves the correlation.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RngInfo {
    pub generator: &'static str,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub index: usize,
    pub config: ExperimentConfig,
    pub rng: RngInfo,
    /// Observed `[min, max]` of each coordinate over all repetitions.
    pub support_x: (f64, f64),
    pub support_y: (f64, f64),
    pub monotonicity_x: MonotonicityReport,
    pub monotonicity_y: MonotonicityReport,
    pub results: Vec<InvarianceResult>,
    pub breakage: Option<BreakageSummary>,
    pub all_held: bool,
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn merge(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.min(b.0), a.1.max(b.1))
}

fn draw_samples(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Sample>> {
    (0..cfg.repetitions).map(|_| cfg.distribution.sample(cfg.n_samples, rng)).collect()
}

/// Relation expected for a signed rank or Pearson coefficient.
fn coefficient_relation(tx: &TransformSpec, ty: &TransformSpec, sx: (f64, f64), sy: (f64, f64)) -> Relation {
    let inc = |t: &TransformSpec, s: (f64, f64)| t.is_strictly_increasing_on(s.0, s.1);
    let dec = |t: &TransformSpec, s: (f64, f64)| t.is_strictly_decreasing_on(s.0, s.1);
    match (inc(tx, sx), dec(tx, sx), inc(ty, sy), dec(ty, sy)) {
        (true, _, true, _) | (_, true, _, true) => Relation::Preserved,
        (true, _, _, true) | (_, true, true, _) => Relation::SignFlipped,
        _ => Relation::Unconstrained,
    }
}

fn copula_results(cfg: &ExperimentConfig, samples: &[Sample], sx: (f64, f64), sy: (f64, f64)) -> Result<Vec<InvarianceResult>> {
    let (tx, ty) = (&cfg.transforms.x, &cfg.transforms.y);
    let both_increasing = tx.is_strictly_increasing_on(sx.0, sx.1) && ty.is_strictly_increasing_on(sy.0, sy.1);
    let copula_relation = if both_increasing { Relation::Preserved } else { Relation::Unconstrained };
    let rank_relation = coefficient_relation(tx, ty, sx, sy);

    let mut out = Vec::with_capacity(3 * samples.len());
    for (rep, s) in samples.iter().enumerate() {
        let t = apply_transform(s, tx, ty)?;
        let distance = empirical_copula_distance(&empirical_copula(s)?, &empirical_copula(&t)?)?;
        out.push(InvarianceResult::new("empirical_copula_distance", rep, 0.0, distance, copula_relation, 0.0));
        out.push(InvarianceResult::new("kendall_tau", rep, kendall_tau(s)?, kendall_tau(&t)?, rank_relation, 0.0));
        out.push(InvarianceResult::new("spearman_rho", rep, spearman_rho(s)?, spearman_rho(&t)?, rank_relation, 0.0));
    }
    Ok(out)
}

fn pearson_results(cfg: &ExperimentConfig, samples: &[Sample]) -> Result<Vec<InvarianceResult>> {
    let (tx, ty) = (&cfg.transforms.x, &cfg.transforms.y);
    let slopes = tx.affine_coefficients().zip(ty.affine_coefficients());
    let relation = match slopes {
        Some(((a, _), (b, _))) if a * b > 0.0 => Relation::Preserved,
        Some(((a, _), (b, _))) if a * b < 0.0 => Relation::SignFlipped,
        _ => return Err(Error::DegenerateTransform("pearson invariance needs nonzero affine slopes".into())),
    };
    samples
        .iter()
        .enumerate()
        .map(|(rep, s)| {
            let t = apply_transform(s, tx, ty)?;
            Ok(InvarianceResult::new("pearson_rho", rep, pearson_rho(s)?, pearson_rho(&t)?, relation, FLOAT_RELATION_TOL))
        })
        .collect()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn breakage(cfg: &ExperimentConfig, samples: &[Sample]) -> Result<(Vec<InvarianceResult>, BreakageSummary)> {
    let Distribution::BivariateNormal { rho } = cfg.distribution else {
        return Err(Error::Config("distribution must be bivariate_normal for pearson_breakage".into()));
    };
    let (tx, ty) = (&cfg.transforms.x, &cfg.transforms.y);
    let mut results = Vec::with_capacity(samples.len());
    let mut transformed = Vec::with_capacity(samples.len());
    for (rep, s) in samples.iter().enumerate() {
        let t = apply_transform(s, tx, ty)?;
        results.push(InvarianceResult::new("pearson_rho", rep, pearson_rho(s)?, pearson_rho(&t)?, Relation::Unconstrained, 0.0));
        transformed.push(t);
    }
    let befores: Vec<f64> = results.iter().map(|r| r.before).collect();
    let afters: Vec<f64> = results.iter().map(|r| r.after).collect();
    let mean_before = befores.iter().sum::<f64>() / befores.len() as f64;
    let (mean_after, standard_error) = if afters.len() >= 2 {
        mean_and_se(&afters)
    } else {
        // one repetition: batch means over contiguous slices of the sample
        let t = &transformed[0];
        let size = t.len() / BREAKAGE_BATCHES;
        let batch = (0..BREAKAGE_BATCHES)
            .map(|b| {
                let r = b * size..(b + 1) * size;
                pearson_rho(&Sample::new(t.x()[r.clone()].to_vec(), t.y()[r].to_vec())?)
            })
            .collect::<Result<Vec<_>>>()?;
        (afters[0], mean_and_se(&batch).1)
    };
    let expected_after = rho * rho;
    Ok((
        results,
        BreakageSummary {
            rho,
            mean_before,
            mean_after,
            expected_after,
            standard_error,
            sigmas: BREAKAGE_SIGMAS,
            within_tolerance: (mean_after - expected_after).abs() <= BREAKAGE_SIGMAS * standard_error,
            gap: (rho - expected_after).abs(),
        },
    ))
}

/// Runs one experiment on RNG stream `index` of `cfg.seed`.
pub fn run_experiment(cfg: &ExperimentConfig, index: usize) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rng = experiment_rng(cfg.seed, index as u64);
    let samples = draw_samples(cfg, &mut rng)?;
    let support_x = samples.iter().map(|s| range(s.x())).reduce(merge).expect("repetitions >= 1");
    let support_y = samples.iter().map(|s| range(s.y())).reduce(merge).expect("repetitions >= 1");

    let (results, breakage_summary) = match cfg.experiment {
        ExperimentKind::CopulaInvariance => (copula_results(cfg, &samples, support_x, support_y)?, None),
        ExperimentKind::PearsonInvariance => (pearson_results(cfg, &samples)?, None),
        ExperimentKind::PearsonBreakage => {
            let (r, b) = breakage(cfg, &samples)?;
            (r, Some(b))
        }
    };
    let monotonicity_x = detect_monotone(&cfg.transforms.x, &uniform_probes(support_x.0, support_x.1, DEFAULT_PROBES)?)?;
    let monotonicity_y = detect_monotone(&cfg.transforms.y, &uniform_probes(support_y.0, support_y.1, DEFAULT_PROBES)?)?;
    let all_held = results.iter().all(|r| r.held) && breakage_summary.is_none_or(|b| b.within_tolerance);

    Ok(ExperimentReport {
        index,
        config: cfg.clone(),
        rng: RngInfo { generator: GENERATOR_NAME, seed: cfg.seed, stream: index as u64 },
        support_x,
        support_y,
        monotonicity_x,
        monotonicity_y,
        results,
        breakage: breakage_summary,
        all_held,
    })
}

/// Copula-invariance results for `cfg`: empirical copula distance, Kendall
/// and Spearman before/after for every repetition.
pub fn copula_invariance_experiment(cfg: &ExperimentConfig) -> Result<Vec<InvarianceResult>> {
    let cfg = ExperimentConfig { experiment: ExperimentKind::CopulaInvariance, ..cfg.clone() };
    Ok(run_experiment(&cfg, 0)?.results)
}

/// Pearson before/after under the configured affine transforms.
pub fn pearson_invariance_experiment(cfg: &ExperimentConfig) -> Result<Vec<InvarianceResult>> {
    let cfg = ExperimentConfig { experiment: ExperimentKind::PearsonInvariance, ..cfg.clone() };
    Ok(run_experiment(&cfg, 0)?.results)
}

/// Squaring experiment; the summary compares the mean transformed Pearson
/// correlation with `rho²`.
pub fn pearson_breakage_experiment(cfg: &ExperimentConfig) -> Result<(Vec<InvarianceResult>, BreakageSummary)> {
    let cfg = ExperimentConfig { experiment: ExperimentKind::PearsonBreakage, ..cfg.clone() };
    let report = run_experiment(&cfg, 0)?;
    Ok((report.results, report.breakage.expect("breakage experiments carry a summary")))
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport, InvarianceResult};
use super::generate::GENERATOR_NAME;
use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

/// On-disk battery document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    pub schema_version: u32,
    pub experiments: Vec<ExperimentConfig>,
}

impl BatteryConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: BatteryConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                cfg.schema_version
            )));
        }
        if cfg.experiments.is_empty() {
            return Err(Error::Config("experiments: list is empty".into()));
        }
        for (i, e) in cfg.experiments.iter().enumerate() {
            e.validate().map_err(|err| match err {
                Error::Config(m) => Error::Config(format!("experiments[{i}]: {m}")),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Replaces every experiment's seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.experiments.iter_mut().for_each(|e| e.seed = seed);
        self
    }
}

/// How well a statistic survived a transform pair across repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preservation {
    Exactly,
    ExactlyUpToSign,
    Approximately,
    ApproximatelyUpToSign,
    NotAtAll,
}

impl Preservation {
    fn of(r: &InvarianceResult) -> Self {
        let tol = super::FLOAT_RELATION_TOL;
        if r.after == r.before {
            Preservation::Exactly
        } else if r.after == -r.before {
            Preservation::ExactlyUpToSign
        } else if r.abs_delta <= tol {
            Preservation::Approximately
        } else if (r.after + r.before).abs() <= tol {
            Preservation::ApproximatelyUpToSign
        } else {
            Preservation::NotAtAll
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: usize,
    pub kind: ExperimentKind,
    pub transforms: String,
    pub statistic: String,
    /// Worst outcome over all repetitions.
    pub preserved: Preservation,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub schema_version: u32,
    pub generator: &'static str,
    /// Experiment `i` draws from stream `i` of its configured seed.
    pub stream_derivation: &'static str,
    pub experiments: Vec<ExperimentReport>,
    pub summary: Vec<SummaryRow>,
    pub all_held: bool,
}

fn summarize(report: &ExperimentReport) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for r in &report.results {
        let outcome = Preservation::of(r);
        match rows.iter_mut().find(|row| row.statistic == r.statistic_name) {
            Some(row) => {
                row.preserved = row.preserved.max(outcome);
                row.repetitions += 1;
            }
            None => rows.push(SummaryRow {
                experiment: report.index,
                kind: report.config.experiment,
                transforms: format!("{} / {}", report.config.transforms.x, report.config.transforms.y),
                statistic: r.statistic_name.clone(),
                preserved: outcome,
                repetitions: 1,
            }),
        }
    }
    rows
}

/// Runs every experiment (in parallel, each on its own RNG stream) and
/// aggregates the results. Output is identical for serial and parallel
/// execution.
pub fn run_battery(configs: &[ExperimentConfig]) -> Result<BatteryReport> {
    if configs.is_empty() {
        return Err(Error::Config("battery has no experiments".into()));
    }
    let experiments = configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| run_experiment(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let summary = experiments.iter().flat_map(summarize).collect();
    let all_held = experiments.iter().all(|e| e.all_held);
    Ok(BatteryReport {
        schema_version: SCHEMA_VERSION,
        generator: GENERATOR_NAME,
        stream_derivation: "stream = experiment index",
        experiments,
        summary,
        all_held,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "schema_version": 1,
        "experiments": [
            {"seed": 3, "n_samples": 50, "repetitions": 2,
             "distribution": {"family": "uniform_square"},
             "transforms": {"x": {"kind": "exp"}, "y": {"kind": "negate"}}}
        ]
    }"#;

    #[test]
    fn parses_and_runs() {
        let cfg = BatteryConfig::from_json(DOC).unwrap();
        assert_eq!(cfg.experiments[0].experiment, ExperimentKind::CopulaInvariance);
        let report = run_battery(&cfg.experiments).unwrap();
        assert!(report.all_held);
        let tau = report.summary.iter().find(|r| r.statistic == "kendall_tau").unwrap();
        assert_eq!(tau.preserved, Preservation::ExactlyUpToSign);
        assert_eq!(tau.repetitions, 2);
        let dist = report.summary.iter().find(|r| r.statistic == "empirical_copula_distance").unwrap();
        assert_eq!(dist.preserved, Preservation::NotAtAll);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad = DOC.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(BatteryConfig::from_json(&bad).unwrap_err().to_string().contains("schema_version"));
        let bad = DOC.replace("\"repetitions\": 2", "\"repetitions\": 0");
        assert!(BatteryConfig::from_json(&bad).unwrap_err().to_string().contains("repetitions"));
        let bad = DOC.replace("\"n_samples\"", "\"samples\"");
        assert!(BatteryConfig::from_json(&bad).unwrap_err().to_string().contains("samples"));
        assert!(run_battery(&[]).is_err());
    }

    #[test]
    fn seed_override_changes_every_experiment() {
        let cfg = BatteryConfig::from_json(DOC).unwrap().with_seed(99);
        assert!(cfg.experiments.iter().all(|e| e.seed == 99));
    }
}

//! Transform-preservation experiments.
//!
//! Strictly increasing transforms leave ranks, and therefore the empirical
//! copula and both rank coefficients, unchanged: these experiments assert
//! exact equality. Affine transforms preserve Pearson's rho up to rounding
//! (and flip its sign for a negative slope); squaring correlated normals
//! moves it from `rho` to `rho²`.

mod battery;
mod detect;
mod experiment;
mod generate;
mod transform;

pub use battery::{run_battery, BatteryConfig, BatteryReport, Preservation, SummaryRow};
pub use detect::{
    detect_affine, detect_monotone, uniform_probes, AffinityReport, MonotonicityReport,
    MonotonicityVerdict, Univariate, DEFAULT_PROBES,
};
pub use experiment::{
    copula_invariance_experiment, pearson_breakage_experiment, pearson_invariance_experiment,
    run_experiment, BreakageSummary, ExperimentConfig, ExperimentKind, ExperimentReport,
    InvarianceResult, Relation, RngInfo, TransformPair, BREAKAGE_SIGMAS, FLOAT_RELATION_TOL,
};
pub use generate::{experiment_rng, Distribution, GENERATOR_NAME};
pub use transform::{apply_transform, MonotoneTable, TransformSpec};

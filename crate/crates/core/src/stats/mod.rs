//! Ranks, rank correlations, Pearson correlation and the empirical copula.
//!
//! Coefficients follow the textbook formulas on tie-free data:
//!
//! * Kendall: `τ = 2/(n(n-1)) Σ_{i<j} sgn(x_j - x_i) sgn(y_j - y_i)`;
//!   tied pairs contribute `sgn(0) = 0`.
//! * Spearman: `ρ = 1 - 6 Σ d_i² / (n(n² - 1))` with `d_i` the rank
//!   difference; with ties the Pearson correlation of average ranks is
//!   returned instead.
//! * Pearson: `Cov(X, Y) / (σ(X) σ(Y))` with population normalisation.

mod coefficients;
mod empirical;
mod rank;
mod sample;

pub use coefficients::{dependence_report, kendall_tau, pearson_rho, spearman_rho, DependenceReport};
pub use empirical::{empirical_copula, empirical_copula_distance, EmpiricalCopula};
pub use rank::{ranks, RankVector};
pub use sample::Sample;

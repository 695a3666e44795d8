//! Copula axiom verification and dependence-preservation experiments.
//!
//! The crate is organised in four layers:
//!
//! * [`copula`]: the [`Copula2D`] abstraction, the built-in families and
//!   counterexamples, and grid-based checks of the copula axioms
//!   (boundary conditions, 2-increasing property, Lipschitz bound).
//! * [`stats`]: ranks, Kendall's tau, Spearman's rho, Pearson's rho and the
//!   empirical copula of a paired sample.
//! * [`lab`]: transforms, seeded sample generators and the invariance /
//!   breakage experiments together with monotonicity and affinity detectors.
//! * [`cli`]: the command handlers behind the `copula-lab` binary.

pub mod cli;
pub mod copula;
pub mod error;
pub mod lab;
pub mod stats;

pub use copula::{Copula2D, GridSpec, Rectangle, UnitPoint, VerificationReport, Witness};
pub use error::{Error, Result};
pub use stats::{DependenceReport, EmpiricalCopula, RankVector, Sample};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

//! Regret minimization when outcome vectors are sparse.
//!
//! The crate provides:
//!
//! - sparse outcome vectors, simplex distributions and a regret ledger;
//! - the entropic and `ℓ^p` mirror maps, and the Tsallis potential with its
//!   Bregman projection onto the simplex;
//! - full-information learners: tuned mirror descent for sparse gains, tuned
//!   exponential weights for sparse losses, and sparsity-adaptive variants of
//!   both;
//! - Tsallis-INF for bandit feedback with sparse losses;
//! - seeded adversaries, including the lower-bound constructions;
//! - a harness that plays learners against adversaries, checks the results
//!   against closed-form bounds and exports trajectories.
//!
//! ```
//! use sparse_regret::{Direction, FullInfoLearner, OmdGains, RegretLedger, SparseOutcome};
//!
//! let mut learner = OmdGains::tuned(4, 1, 100).unwrap();
//! let mut ledger = RegretLedger::new(4, Direction::Gain);
//! for t in 0..100 {
//!     let omega = SparseOutcome::new(4, vec![(t % 2, 1.0)], Direction::Gain).unwrap();
//!     let x = learner.step(&omega).unwrap();
//!     ledger.update(&omega, &x, None).unwrap();
//! }
//! assert!(ledger.regret() <= 10.0);
//! ```

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversaries;
pub mod bandit;
pub mod bounds;
mod error;
pub mod full_info;
pub mod harness;
pub mod ledger;
pub mod outcome;
pub mod regularizers;
pub mod rng;
pub mod simplex;

pub use adversaries::{generate, AdversaryKind, AdversarySpec, GeneratedSequence};
pub use bandit::{BanditEtaRule, BanditLearner, TsallisInf, UniformPlay};
pub use bounds::{bound_table, theoretical_bound, BoundKind, BoundSetting, BoundTable};
pub use error::{Error, Result};
pub use full_info::{AdaptiveGains, AdaptiveLosses, Ewa, FullInfoLearner, OmdGains};
pub use harness::{
    compare_to_bound, export, run_experiment, Algorithm, BoundReport, ExperimentConfig,
    ExportFormat, RunResult, Summary,
};
pub use ledger::RegretLedger;
pub use outcome::{Direction, SparseOutcome};
pub use rng::RngStream;
pub use simplex::SimplexDistribution;

//! Bayesian persuasion when the designer does not know the prior.
//!
//! The crate is organised bottom-up:
//!
//! - [`belief`], [`matrix`], [`scheme`], [`instance`]: the single-period game.
//! - [`persuasion`]: Bayes updates, receiver best responses, sender utility and
//!   persuasiveness checks.
//! - [`margins`]: the regularity constants `G` and `D` together with their witnesses.
//! - [`lp`]: a dense two-phase simplex used by the optimal-scheme and margin code.
//! - [`optimal`]: optimal schemes for a known prior, both the general LP and the
//!   binary-action fractional-knapsack characterisation.
//! - [`robustify`]: turns a scheme persuasive for an estimate into one persuasive for
//!   every prior in an l1 ball around it.
//! - [`learners`]: the prior-learning algorithms behind a propose/observe contract.
//! - [`sim`]: episode runner, regret accounting, instance generators and brute-force
//!   oracles.
//!
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in the
//! companion `persuade-cli` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod belief;
pub mod error;
pub mod instance;
pub mod learners;
pub mod lp;
pub mod margins;
pub mod matrix;
pub mod math;
pub mod optimal;
pub mod persuasion;
pub mod robustify;
pub mod scheme;
pub mod sim;

pub use belief::Belief;
pub use error::{Error, Result};
pub use instance::{Instance, PublicModel, ReceiverNormalization};
pub use margins::{compute_margins, Margins};
pub use matrix::UtilityMatrix;
pub use persuasion::{
    best_response, is_persuasive, posterior_update, sender_utility, utility_at, Persuasiveness,
    TieRule,
};
pub use scheme::SignalingScheme;

/// Absolute tolerance for persuasiveness constraints and other feasibility checks.
pub const PERSUASION_TOL: f64 = 1e-9;

/// Tolerance on probability vectors summing to one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Signals whose unconditional probability is at or below this are treated as never sent.
pub const ZERO_SIGNAL_PROB: f64 = 1e-15;

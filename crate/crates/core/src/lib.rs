//! α-mutual informations, conditional Rényi entropies and the leakage
//! representations built on them.
//!
//! All quantities are in nats. The five measures live in [`alpha_mi`], the
//! conditional entropies in [`cond_renyi`] and the adversarial gain
//! functions with their leakage ratios in [`leakage`].

pub mod alpha_mi;
pub mod cli;
pub mod cond_renyi;
pub mod error;
pub mod leakage;
pub mod means;
pub mod renyi;
pub mod simplex;
pub mod verify;

pub use alpha_mi::{Measure, MiResult, SolverConfig};
pub use error::{Error, Result};
pub use simplex::{AlphaOrder, Channel, DecisionRule, Distribution, Joint, Normalization};

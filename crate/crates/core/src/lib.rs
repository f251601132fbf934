//! Solvers and verifiers for fractional stable matchings in marriage and
//! roommates markets.
//!
//! Agents hold exact-rational satisfaction values towards each other; a
//! fractional matching assigns nonnegative weights to acceptable pairs with
//! per-agent totals at most one. The crate implements three stability
//! concepts (ordinal, cardinal, linear), the stable-partition machinery
//! that produces ordinally stable matchings in `O(n^2)`, polynomial
//! optimizers for the strict bipartite case, an exact-rational LP/MILP
//! engine for the NP-hard cases at desk scale, and generators for the
//! independent-set hardness constructions.
//!
//! Start with the runnable examples (`cargo run --example check_stability`,
//! etc.) or the `fracstable` CLI. All arithmetic is exact: every certified
//! value is an equality over arbitrary-precision rationals.

pub mod cli;
pub mod error;
pub mod bipartite;
pub mod fixtures;
pub mod flow;
pub mod gen;
pub mod lattice;
pub mod lp;
pub mod matching;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod reductions;
pub mod stability;

pub use error::Error;
pub use matching::FractionalMatching;
pub use model::{Instance, PreferenceProfile, Side};
pub use rational::Rat;
pub use stability::StabilityConcept;

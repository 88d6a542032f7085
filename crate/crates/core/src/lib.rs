//! Learning interpretable error functions for constraints.
//!
//! An error function maps an assignment of a constraint's variables to a
//! non-negative cost that is zero exactly on solutions. This crate learns
//! such functions as small compositional networks (four layers of
//! selectable operations, encoded as a 31-bit genome) trained by a genetic
//! algorithm to approximate the Hamming distance to the nearest solution.
//! Learned functions can then drive a local search solver.
//!
//! Modules, in pipeline order: [`concepts`] (constraint predicates),
//! [`spaces`] (labeled assignment spaces), [`hamming`] (supervision costs),
//! [`icn`] (the network), [`ga`] (learning), [`solver`] (local search and
//! the Sudoku benchmark), and [`cli`] (the `icn` command).

pub mod cli;
pub mod concepts;
pub mod error;
pub mod ga;
pub mod hamming;
pub mod icn;
pub mod seed;
pub mod solver;
pub mod spaces;

pub use concepts::{ConstraintInstance, ConstraintKind, Domain};
pub use error::{Error, Result};
pub use ga::{learn, learn_runs, GaConfig, LearnResult};
pub use hamming::{approx_hamming, exact_hamming, SolutionSet};
pub use icn::{describe, ErrorFunction, EvalContext, Genome, GenomeFile};
pub use spaces::{Entry, LabeledSpace};

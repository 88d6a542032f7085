//! Local search over CSP and EFSP models, and the Sudoku benchmark.

mod bench;
mod model;
mod search;
mod sudoku;

pub use bench::{benchmark_sudoku, BenchReport, RunRecord, RunStats};
pub use model::{CspModel, EfspModel, ErrorFn, Model, SearchModel};
pub use search::{solve, solve_with, SolveOutcome, SolverConfig, Status};
pub use sudoku::{alldiff_primal_violation, build_sudoku, hardcoded_for, sudoku_scopes, Variant};

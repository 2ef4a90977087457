//! Verification machinery: a dense direct solver for the finite-difference
//! system, manufactured solutions with exact Laplacians, error norms and
//! convergence-order fits, and the suite driven by the command line.

pub mod dense;
pub mod mms;
pub mod suite;

pub use suite::{run_suite, CaseResult, SuiteOptions, SuiteSummary};

pub use dense::{dense_oracle_solve, DenseSolution};
pub use mms::{convergence_order, mms_error, ConvergenceReport, ErrorNorms, ManufacturedCase, Profile, RhsKind};

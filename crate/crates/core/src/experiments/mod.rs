//! Experiment drivers behind the CLI: seeded, configurable reproductions of
//! the calculus laws with machine-readable reports.

pub mod config;
pub mod report;
pub mod runs;

pub use config::ExperimentConfig;
pub use report::{write_csv, CheckMode, CheckRecord, Checker, Report};
pub use runs::{
    load_function, load_operators, perturbation_fixture, run_apply, run_cayley_check,
    run_commutator_bound, run_composition, run_convergence, run_oracle_suite, run_perturbation,
    run_recovery, run_support_scan, FunctionSpec,
};

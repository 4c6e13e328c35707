//! Monte-Carlo experiment machinery: user grouping, configuration,
//! seeded sweep execution, and result emission.

pub mod config;
pub mod grouping;
pub mod runner;
pub mod seed;

pub use config::{Algorithm, ExperimentConfig, SolverSettings, Sweep};
pub use grouping::{group_users, regroup, ClusterAssignment, GroupingScheme};
pub use runner::{run_monte_carlo, run_with_details, write_outputs, MonteCarlo, ResultRow};

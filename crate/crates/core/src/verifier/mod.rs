//! Trace monitors, the exhaustive worst-case oracle, bound reporting and the
//! symmetry checks on the decision rule.

pub mod equivariance;
pub mod minimax;
pub mod monitors;
pub mod report;

pub use equivariance::{equivariance_suite, EquivarianceReport};
pub use minimax::{worst_case_rounds, SearchOptions, WorstCaseResult, WorstRounds};
pub use monitors::{check_invariants, InvariantReport, Monitor};
pub use report::{bound_report, BoundReport};

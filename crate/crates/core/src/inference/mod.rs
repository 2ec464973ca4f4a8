//! Tests that verify or refute self-inverseness, exchangeability and iid-ratio decomposability.

pub mod cf;
pub mod exchange;
pub mod ks;
pub mod report;
pub mod symmetry;

pub use cf::{
    analytic_log_cf, empirical_cf, iid_decomposability_obstruction, linear_grid, log_abs, CfCurve,
    CfSource,
};
pub use exchange::{bowker_statistic, exact_symmetry_check, exchangeability_test, Grid};
pub use ks::{ks_one_sample, ks_two_sample, ks_two_sample_statistic, null_rejection_rate};
pub use report::{Decision, TestReport};
pub use symmetry::{log_symmetry_test, self_inverse_test, Subject};

//! Statistical kernel: least squares with diagnostics, backward selection,
//! influence filtering and the three hypothesis tests the pipeline needs.
//!
//! Everything here is a pure function of its inputs.

pub mod descriptive;
mod design;
mod influence;
mod normality;
mod ols;
mod ranktests;
mod stepwise;

pub use design::{DesignMatrix, INTERCEPT};
pub use influence::{cooks_distances, cooks_filter, InfluenceOutcome};
pub use normality::{shapiro_wilk, SW_MAX_N, SW_MIN_N};
pub use ols::{dependent_columns, fit_ols, Coefficient, ModelFit, RANK_TOLERANCE};
pub use ranktests::{mann_whitney_u, wilcoxon_signed_rank, MWU_EXACT_MAX, WILCOXON_EXACT_MAX};
pub use stepwise::{backward_stepwise, DEFAULT_ALPHA_REMOVE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    ShapiroWilk,
    MannWhitneyU,
    WilcoxonSignedRank,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::ShapiroWilk => "shapiro_wilk",
            TestMethod::MannWhitneyU => "mann_whitney_u",
            TestMethod::WilcoxonSignedRank => "wilcoxon_signed_rank",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: f64,
    /// Sample size(s) entering the test.
    pub n: Vec<usize>,
    /// Exact null distribution rather than the normal approximation.
    pub exact: bool,
}

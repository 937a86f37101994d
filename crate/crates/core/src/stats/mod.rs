//! Statistical machinery: rank correlation tests, the minimum-points rule,
//! binomial count classification, randomization tests, lowess smoothing,
//! single-breakpoint regression and one-way ANOVA.

mod anova;
mod binomial;
mod breakpoint;
mod correlation;
mod lowess;
mod randomization;

pub use anova::{anova_one_way, one_way_f, AnovaResult};
pub use binomial::{
    arrow, arrow_with, binomial_central_interval, classify_counts, Arrow, ArrowMode, RoleSummary,
};
pub use breakpoint::{
    bootstrap_breakpoint_ci, default_min_segment, fit_line, fit_single_breakpoint, BreakpointFit,
    LineFit,
};
pub use correlation::{
    average_ranks, min_time_points, spearman, spearman_test, spearman_test_with, CorrelationResult,
    SignClass, SigClass, SpearmanMethod, EXACT_MAX_POINTS,
};
pub use lowess::{lowess, LOWESS_FRAC, LOWESS_ITERS};
pub use randomization::{fisher_randomization, substream};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("correlation undefined: constant input vector")]
    ConstantInput,
    #[error("non-finite input value")]
    NonFinite,
    #[error("significance level must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
}

//! Scalar kernels: binomial tails, the threshold functions and bisection.

mod binomial;
mod root;
mod special;

pub use binomial::{binom_log_pmf, binom_tail, binom_tail_clamped, TailDirection, TailQuery};
pub use root::{bisect, MAX_BISECTION_ITERATIONS};
pub use special::{eval_f, eval_g, eval_h, eval_h_flagged, eval_z, ln_f, ln_g, ln_h, HValue, LINE_BAND};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("cutoff {cutoff} is outside 0..={trials}")]
    CutoffOutOfRange { cutoff: i64, trials: u64 },
    #[error("probability {0} is outside the open interval (0, 1)")]
    InvalidProbability(f64),
    #[error("argument {value} is outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("non-finite function value at {0}")]
    NonFinite(f64),
    #[error("bisection tolerance must be positive")]
    BadTolerance,
}

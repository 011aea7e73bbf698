use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{function} is undefined at x = {x}")]
    Domain { function: &'static str, x: f64 },

    #[error("hypergeometric series did not converge within {terms} terms at z = {z}")]
    NonConvergence { z: f64, terms: usize },

    #[error("derivative of order {order} failed")]
    DerivativeOrder {
        order: usize,
        #[source]
        source: Box<Error>,
    },

    /// The Markov lower bound only exists for `M` inside `[lo, hi]`.
    #[error("lower bound not defined for M = {m} (valid window is [{lo}, {hi}])")]
    NotDefined { m: u32, lo: i64, hi: i64 },

    #[error("numerical failure: {what} = {value}")]
    Numerical { what: &'static str, value: f64 },

    #[error("interferer channels are degenerate (projected norm {ratio:e} of ||h0||)")]
    DegenerateProjection { ratio: f64 },

    #[error("{redrawn} of {trials} trials needed a channel redraw (limit 0.1%)")]
    TooManyRedraws { redrawn: u64, trials: u64 },

    #[error("simulation window holds fewer than {needed} points with probability {probability:e}")]
    WindowTooSmall { needed: u32, probability: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// True for errors caused by the caller's arguments rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Domain { .. } | Error::NotDefined { .. }
        )
    }
}

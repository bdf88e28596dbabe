//! Long-string asymptotics: specific Renyi entropies, scaled cumulant
//! generating functions, large-deviations rate functions for single users
//! and for identifying U of V users, and the guesswork PMF approximation
//! they induce.
//!
//! Everything internal is in natural log; converting to bits is a
//! presentation concern handled through [`LogBase`].

mod rate;
mod renyi;

pub use rate::{
    convexity_report, delta_gamma, pmf_approx, pmf_approx_ln, rate_multi, rate_single,
    rate_single_at, rate_single_with_points, scgf_multi, ConvexityReport, ConvexityWitness,
    MultiRateCurve, RateCurve, SwitchPoint, DEFAULT_RATE_POINTS,
};
pub use renyi::{avg_growth_exponent, renyi_iid, renyi_markov, scgf_single, RenyiCurve, Scgf};

/// Which logarithm presentation-facing values are reported in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Nats,
    Bits,
}

impl LogBase {
    /// Convert a natural-log quantity into this base.
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Nats => x,
            LogBase::Bits => x / std::f64::consts::LN_2,
        }
    }
}

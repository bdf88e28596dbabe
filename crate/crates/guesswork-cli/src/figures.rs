//! Deterministic datasets behind the report figures: average-guesswork
//! growth exponents of Bernoulli sources against the excess user count,
//! the predicted average guesswork at cipher-scale key lengths, the
//! mismatched bit/byte rate functions, and the single-versus-many-users
//! entropy gap of two-state Markov sources. All values are base 2.

use guesswork_core::asymptotic::{
    avg_growth_exponent, rate_multi, rate_single_with_points, LogBase, MultiRateCurve, RateCurve,
    RenyiCurve, Scgf, DEFAULT_RATE_POINTS,
};
use guesswork_core::sources::{Alphabet, IidSource, MarkovSource};

use crate::error::CliError;

pub const FIGURE_IDS: [&str; 4] = ["fig1-left", "fig1-right", "fig2", "fig3"];

/// Bernoulli parameters plotted on the growth-rate panel.
pub const FIG1_PS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

/// Largest excess user count V - U on the growth-rate panels.
pub const FIG1_MAX_EXCESS: usize = 8;

/// Key length of the predicted-average panel (triple DES scale).
pub const FIG1_KEY_LENGTH: usize = 168;

/// Rows (p, V-U, exponent in bits): the average-guesswork growth rate of
/// identifying U of V strings from Bernoulli(p) sources.
pub fn fig1_left_rows() -> Result<Vec<(f64, usize, f64)>, CliError> {
    let mut rows = Vec::new();
    for &p in &FIG1_PS {
        let renyi = RenyiCurve::iid(&IidSource::bernoulli(p)?);
        for excess in 0..=FIG1_MAX_EXCESS {
            let exponent = LogBase::Bits.from_nats(avg_growth_exponent(&renyi, 1, 1 + excess)?);
            rows.push((p, excess, exponent));
        }
    }
    Ok(rows)
}

/// Rows (V-U, approximate average guesswork) for 168-bit Bernoulli(0.25)
/// strings: 2^(168 * exponent).
pub fn fig1_right_rows() -> Result<Vec<(usize, f64)>, CliError> {
    let renyi = RenyiCurve::iid(&IidSource::bernoulli(0.25)?);
    let mut rows = Vec::new();
    for excess in 0..=FIG1_MAX_EXCESS {
        let exponent = LogBase::Bits.from_nats(avg_growth_exponent(&renyi, 1, 1 + excess)?);
        rows.push((excess, (FIG1_KEY_LENGTH as f64 * exponent).exp2()));
    }
    Ok(rows)
}

/// The mismatched two-user problem: a uniform bit string and a skewed
/// byte string over one 8-character alphabet, U = 1.
pub struct MismatchedPair {
    pub bit_rate: RateCurve,
    pub byte_rate: RateCurve,
    pub combined: MultiRateCurve,
}

pub fn mismatched_pair(points: usize) -> Result<MismatchedPair, CliError> {
    let alphabet = Alphabet::new(8)?;
    let bit_user = IidSource::new(
        alphabet,
        vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    )?;
    let byte_user = IidSource::new(
        alphabet,
        vec![0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05],
    )?;
    let bit_rate = rate_single_with_points(&Scgf::new(RenyiCurve::iid(&bit_user)), points)
        .map_err(CliError::from)?;
    let byte_rate = rate_single_with_points(&Scgf::new(RenyiCurve::iid(&byte_user)), points)
        .map_err(CliError::from)?;
    let combined = rate_multi(&[bit_rate.clone(), byte_rate.clone()], 1)?;
    Ok(MismatchedPair {
        bit_rate,
        byte_rate,
        combined,
    })
}

/// Rows (x, rate_bit, rate_byte, rate_identify_one) in bits.
pub fn fig2_rows(points: Option<usize>) -> Result<Vec<(f64, f64, f64, f64)>, CliError> {
    let pair = mismatched_pair(points.unwrap_or(DEFAULT_RATE_POINTS))?;
    let to_bits = |v: f64| LogBase::Bits.from_nats(v);
    Ok((0..pair.bit_rate.points())
        .map(|i| {
            (
                to_bits(pair.bit_rate.x_at(i)),
                to_bits(pair.bit_rate.values()[i]),
                to_bits(pair.byte_rate.values()[i]),
                to_bits(pair.combined.curve.values()[i]),
            )
        })
        .collect())
}

/// Rows (a, b, R(1/2) - R(1)) in bits over an interior grid of (0,1)^2:
/// the security gap between a single-user system and one with arbitrarily
/// many users, for the two-state chain.
pub fn fig3_rows(steps: Option<usize>) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let steps = steps.unwrap_or(19);
    if steps < 1 {
        return Err(CliError::Config("fig3 grid needs at least one step".into()));
    }
    let mut rows = Vec::with_capacity(steps * steps);
    for i in 1..=steps {
        let a = i as f64 / (steps + 1) as f64;
        for j in 1..=steps {
            let b = j as f64 / (steps + 1) as f64;
            let renyi = RenyiCurve::markov(&MarkovSource::two_state(a, b)?)?;
            let gap = LogBase::Bits.from_nats(renyi.value(0.5)? - renyi.shannon());
            rows.push((a, b, gap));
        }
    }
    Ok(rows)
}

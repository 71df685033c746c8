use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lambda;
use crate::error::{Error, Result};
use crate::graph::{draw_stationary, stationary_sampler};
use crate::model::{EdgeState, IntervalSampler, LinkParams, StepTable};
use crate::scalar::Real;
use crate::stats::proportion_sigma;

/// Generic bound on staying disconnected for `l` steps given a start in a state set `A`:
/// `1 - delta^l (1 - (lambda/delta)^l pi(A∩D)/pi(A))`, clamped to `[0, 1]`.
///
/// `lambda_step` bounds the probability of remaining in `A∩D`, `delta_step`
/// lower-bounds the probability of remaining in `A`.
pub fn disconnection_bound<T: Real>(
    lambda_step: T,
    delta_step: T,
    pi_ad: T,
    pi_a: T,
    l: u32,
) -> Result<T> {
    let unit = |x: T| x >= T::zero() && x <= T::one();
    if !(delta_step > T::zero() && delta_step <= T::one()) {
        return Err(Error::Precondition(format!(
            "delta = {delta_step} must lie in (0, 1]"
        )));
    }
    if !unit(lambda_step) || !unit(pi_ad) || !unit(pi_a) {
        return Err(Error::Precondition(
            "lambda and stationary masses must lie in [0, 1]".into(),
        ));
    }
    if pi_a <= T::zero() {
        return Err(Error::Precondition(
            "pi(A) = 0: conditional probability undefined".into(),
        ));
    }
    let l = l as i32;
    let ratio = (lambda_step / delta_step).powi(l) * pi_ad / pi_a;
    let v = T::one() - delta_step.powi(l) * (T::one() - ratio);
    Ok(v.max(T::zero()).min(T::one()))
}

/// Arguments `(lambda, delta, pi(H∩D), pi(H))` of the generic bound for `A = {HC, HD}`.
pub fn home_disconnection_args<T: Real>(link: &LinkParams<T>) -> (T, T, T, T) {
    let one = T::one();
    let z = link.p + link.q;
    (
        (one - link.q) * (one - link.alpha),
        one - link.q,
        link.p * (one - link.alpha) / z,
        link.p / z,
    )
}

/// `1 - (1-q)^l (1 - (1-alpha)^l)`.
///
/// Plugging [`home_disconnection_args`] into [`disconnection_bound`] gives
/// the slightly smaller `1 - (1-q)^l (1 - (1-alpha)^(l+1))`; this form is the
/// weaker of the two and so also holds.
pub fn home_disconnection_bound<T: Real>(link: &LinkParams<T>, l: u32) -> T {
    let one = T::one();
    let l = l as i32;
    one - (one - link.q).powi(l) * (one - (one - link.alpha).powi(l))
}

/// `min(1/alpha, 1/(4q))`, infinite components for zero probabilities.
pub fn connection_window_cap<T: Real>(link: &LinkParams<T>) -> T {
    let inv = |x: T| {
        if x > T::zero() {
            T::one() / x
        } else {
            T::infinity()
        }
    };
    inv(link.alpha).min(inv(T::lit(4.0) * link.q))
}

/// Lower bound `l / Lambda` on the probability that an edge started from
/// stationarity is connected at least once in steps `0..=l`.
///
/// Valid for `l <= min(1/alpha, 1/(4q))`.
pub fn connection_lower_bound<T: Real>(link: &LinkParams<T>, l: u32) -> Result<T> {
    let lam = lambda(link)?;
    let cap = connection_window_cap(link);
    if T::lit(l as f64) > cap {
        return Err(Error::Precondition(format!(
            "l = {l} exceeds min(1/alpha, 1/(4q)) = {cap}"
        )));
    }
    Ok(T::lit(l as f64) / lam)
}

/// The stronger `4 l / Lambda = pi(HC) l` form quoted by the informal argument.
///
/// Not a proven bound; it is reported next to [`connection_lower_bound`] for comparison.
pub fn informal_connection_bound<T: Real>(link: &LinkParams<T>, l: u32) -> Result<T> {
    Ok(T::lit(4.0 * l as f64) / lambda(link)?)
}

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub l: u32,
    pub estimate: f64,
    pub sigma: f64,
    pub trials: usize,
}

/// For every `l` in `1..=l_max`, the fraction of `trials` chains, started at
/// Home from the stationary law restricted to Home, that stay disconnected
/// through steps `0..=l`.
pub fn estimate_home_disconnection<T: Real, R: Rng + ?Sized>(
    link: &LinkParams<T>,
    l_max: u32,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<Estimate>> {
    link.validate()?;
    let table = StepTable::new(link);
    // restricted to Home: HC with probability alpha, HD otherwise
    let start = IntervalSampler::from_matrix_order([
        link.alpha,
        T::one() - link.alpha,
        T::zero(),
        T::zero(),
    ]);
    let survived = survival_counts(&table, l_max, trials, rng, |r| draw_stationary(&start, r));
    Ok(to_estimates(&survived, trials, 1, |c| c))
}

/// For every `l` in `0..=l_max`, the fraction of stationary-start chains
/// connected at least once in steps `0..=l`.
pub fn estimate_connection_prob<T: Real, R: Rng + ?Sized>(
    link: &LinkParams<T>,
    l_max: u32,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<Estimate>> {
    let sampler = stationary_sampler(link)?;
    let table = StepTable::new(link);
    let survived = survival_counts(&table, l_max, trials, rng, |r| draw_stationary(&sampler, r));
    Ok(to_estimates(&survived, trials, 0, |c| trials as u64 - c))
}

/// `counts[l]` = chains disconnected throughout `0..=l`.
fn survival_counts<T: Real, R: Rng + ?Sized>(
    table: &StepTable<T>,
    l_max: u32,
    trials: usize,
    rng: &mut R,
    mut start: impl FnMut(&mut R) -> EdgeState,
) -> Vec<u64> {
    let mut counts = vec![0u64; l_max as usize + 1];
    for _ in 0..trials {
        let mut s = start(rng);
        for (l, slot) in counts.iter_mut().enumerate() {
            if l > 0 {
                s = table.step(s, T::unit_from_f64(rng.random::<f64>()));
            }
            if s.connected() {
                break;
            }
            *slot += 1;
        }
    }
    counts
}

fn to_estimates(
    counts: &[u64],
    trials: usize,
    first: u32,
    f: impl Fn(u64) -> u64,
) -> Vec<Estimate> {
    counts
        .iter()
        .enumerate()
        .skip(first as usize)
        .map(|(l, &c)| {
            let est = f(c) as f64 / trials as f64;
            Estimate {
                l: l as u32,
                estimate: est,
                sigma: proportion_sigma(est, trials),
                trials,
            }
        })
        .collect()
}

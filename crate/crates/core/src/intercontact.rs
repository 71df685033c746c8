//! Inter-contact time of a single link.
//!
//! Conditioned on a contact happening now, the pair is at Home with
//! probability `p a / (p a + q g)`. From there, `P_kH` (`P_kN`) is the
//! probability that the next contact is exactly `k` steps later when starting
//! from Home (Non-Home):
//!
//! ```text
//! P_1H = (1-q)a + q g              P_1N = (1-p)g + p a
//! P_kH = q(1-g) P_(k-1)N + (1-q)(1-a) P_(k-1)H
//! P_kN = (1-p)(1-g) P_(k-1)N + p(1-a) P_(k-1)H
//! ```
//!
//! The ccdf is carried by the matching survival recursion rather than by
//! `1 - sum(pmf)`, so deep tails keep their relative precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{draw_stationary, stationary_sampler, EdgeChain};
use crate::model::{HomeMegParams, LinkParams};
use crate::scalar::Real;
use crate::uniforms::derive_seed;

/// Minimum number of gaps an empirical distribution is built from.
pub const MIN_GAPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactCondProbs<T> {
    pub p_h_given_contact: T,
    pub p_nh_given_contact: T,
}

pub fn contact_cond_probs<T: Real>(link: &LinkParams<T>) -> Result<ContactCondProbs<T>> {
    link.validate()?;
    let home = link.p * link.alpha;
    let away = link.q * link.gamma;
    let z = home + away;
    if z <= T::zero() {
        return Err(Error::NoContacts);
    }
    Ok(ContactCondProbs {
        p_h_given_contact: home / z,
        p_nh_given_contact: away / z,
    })
}

/// Pmf and ccdf of the inter-contact time up to a horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcDistribution<T> {
    /// `pmf[i] = P(IC = i + 1)`.
    pub pmf: Vec<T>,
    /// `ccdf[k] = P(IC > k)` for `k = 0..=horizon`.
    pub ccdf: Vec<T>,
    pub horizon: usize,
    /// `P(IC > horizon)`.
    pub tail_mass: T,
}

impl<T: Real> IcDistribution<T> {
    /// `P(IC = k)`; zero outside `1..=horizon`.
    pub fn pmf_at(&self, k: usize) -> T {
        if k == 0 {
            return T::zero();
        }
        self.pmf.get(k - 1).copied().unwrap_or(T::zero())
    }

    /// `P(IC > k)`; for `k > horizon` only the tail mass is known.
    pub fn ccdf_at(&self, k: usize) -> T {
        self.ccdf.get(k).copied().unwrap_or(self.tail_mass)
    }

    /// Builds an empirical distribution from `counts[k] = #gaps of length k`.
    pub fn from_gap_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let horizon = counts.len().saturating_sub(1);
        let tot = T::lit(total as f64);
        let pmf: Vec<T> = (1..=horizon)
            .map(|k| T::lit(counts[k] as f64) / tot)
            .collect();
        let mut ccdf = Vec::with_capacity(horizon + 1);
        let mut remaining = total;
        ccdf.push(T::one());
        for &c in counts.iter().skip(1) {
            remaining -= c;
            ccdf.push(T::lit(remaining as f64) / tot);
        }
        IcDistribution {
            pmf,
            ccdf,
            horizon,
            tail_mass: T::zero(),
        }
    }

    /// Total variation after lumping everything beyond `k_max` into one atom.
    pub fn tv_truncated(&self, other: &IcDistribution<T>, k_max: usize) -> T {
        let body = (1..=k_max).fold(T::zero(), |acc, k| {
            acc + (self.pmf_at(k) - other.pmf_at(k)).abs()
        });
        let tail = (self.ccdf_at(k_max) - other.ccdf_at(k_max)).abs();
        T::lit(0.5) * (body + tail)
    }

    /// Ccdf at wall-clock times, one step lasting `step_seconds`.
    /// Returns `(t_seconds, k, P(IC > k))` with `k = max(1, round(t / step))`.
    pub fn ccdf_at_seconds(&self, times: &[f64], step_seconds: f64) -> Vec<(f64, usize, T)> {
        times
            .iter()
            .map(|&t| {
                let k = seconds_to_steps(t, step_seconds);
                (t, k, self.ccdf_at(k))
            })
            .collect()
    }
}

/// `max(1, round(t / step))`.
pub fn seconds_to_steps(t_seconds: f64, step_seconds: f64) -> usize {
    let k = (t_seconds / step_seconds).round();
    if k < 1.0 {
        1
    } else {
        k as usize
    }
}

/// Walks `(P(IC > k), P(IC = k))` for `k = 1, 2, ...` in O(1) state.
#[derive(Debug, Clone)]
pub struct IcRecursion<T> {
    w_home: T,
    w_away: T,
    // next-contact-exactly-k probabilities
    p_home: T,
    p_away: T,
    // survival: no contact in steps 1..k
    s_home: T,
    s_away: T,
    first_home: T,
    first_away: T,
    // transition-and-miss coefficients
    hh: T,
    hn: T,
    nh: T,
    nn: T,
    k: usize,
}

impl<T: Real> IcRecursion<T> {
    pub fn new(link: &LinkParams<T>) -> Result<Self> {
        let cond = contact_cond_probs(link)?;
        let one = T::one();
        let (p, q, a, g) = (link.p, link.q, link.alpha, link.gamma);
        Ok(IcRecursion {
            w_home: cond.p_h_given_contact,
            w_away: cond.p_nh_given_contact,
            p_home: T::zero(),
            p_away: T::zero(),
            s_home: one,
            s_away: one,
            first_home: (one - q) * a + q * g,
            first_away: (one - p) * g + p * a,
            hh: (one - q) * (one - a),
            hn: q * (one - g),
            nh: p * (one - a),
            nn: (one - p) * (one - g),
            k: 0,
        })
    }

    /// Current `k`.
    pub fn k(&self) -> usize {
        self.k
    }
}

impl<T: Real> Iterator for IcRecursion<T> {
    /// `(P(IC = k), P(IC > k))`.
    type Item = (T, T);

    fn next(&mut self) -> Option<(T, T)> {
        let (p_home, p_away) = if self.k == 0 {
            (self.first_home, self.first_away)
        } else {
            (
                self.hn * self.p_away + self.hh * self.p_home,
                self.nn * self.p_away + self.nh * self.p_home,
            )
        };
        let s_home = self.hh * self.s_home + self.hn * self.s_away;
        let s_away = self.nh * self.s_home + self.nn * self.s_away;
        self.p_home = p_home;
        self.p_away = p_away;
        self.s_home = s_home;
        self.s_away = s_away;
        self.k += 1;
        Some((
            self.w_home * p_home + self.w_away * p_away,
            self.w_home * s_home + self.w_away * s_away,
        ))
    }
}

/// Analytic distribution for `k = 1..=k_max`.
pub fn ic_pmf<T: Real>(link: &LinkParams<T>, k_max: usize) -> Result<IcDistribution<T>> {
    ic_pmf_until(link, k_max, T::zero())
}

/// Like [`ic_pmf`] but stops as soon as the ccdf drops below `tail_tol`.
pub fn ic_pmf_until<T: Real>(
    link: &LinkParams<T>,
    k_max: usize,
    tail_tol: T,
) -> Result<IcDistribution<T>> {
    if k_max == 0 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    let mut pmf = Vec::new();
    let mut ccdf = vec![T::one()];
    for (mass, tail) in IcRecursion::new(link)?.take(k_max) {
        pmf.push(mass);
        ccdf.push(tail);
        if tail < tail_tol {
            break;
        }
    }
    let horizon = pmf.len();
    Ok(IcDistribution {
        tail_mass: ccdf[horizon],
        pmf,
        ccdf,
        horizon,
    })
}

/// Model ccdf `P(IC > k)` at each requested `k`, computed in one pass.
pub fn ccdf_at_steps<T: Real>(link: &LinkParams<T>, ks: &[usize]) -> Result<Vec<T>> {
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let mut table = vec![T::one(); k_max + 1];
    for (k, (_, tail)) in IcRecursion::new(link)?.take(k_max).enumerate() {
        table[k + 1] = tail;
    }
    Ok(ks.iter().map(|&k| table[k]).collect())
}

/// Gap-length histogram of one edge run of `steps` steps from stationarity.
fn gap_counts<T: Real, R: Rng + ?Sized>(
    link: &LinkParams<T>,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let sampler = stationary_sampler(link)?;
    let start = draw_stationary(&sampler, rng);
    let mut counts: Vec<u64> = vec![0];
    let mut last_contact: Option<usize> = start.connected().then_some(0);
    for (i, s) in EdgeChain::new(link, start, rng).take(steps).enumerate() {
        if s.connected() {
            let t = i + 1;
            if let Some(prev) = last_contact {
                let gap = t - prev;
                if counts.len() <= gap {
                    counts.resize(gap + 1, 0);
                }
                counts[gap] += 1;
            }
            last_contact = Some(t);
        }
    }
    Ok(counts)
}

fn finish(counts: Vec<u64>) -> Result<IcDistribution<f64>> {
    let observed: u64 = counts.iter().sum();
    if (observed as usize) < MIN_GAPS {
        return Err(Error::InsufficientData {
            observed: observed as usize,
            required: MIN_GAPS,
        });
    }
    Ok(IcDistribution::from_gap_counts(&counts))
}

/// Empirical inter-contact distribution of one edge run from stationarity.
pub fn empirical_ic<T: Real, R: Rng + ?Sized>(
    link: &LinkParams<T>,
    steps: usize,
    rng: &mut R,
) -> Result<IcDistribution<f64>> {
    link.validate()?;
    finish(gap_counts(link, steps, rng)?)
}

/// Gaps pooled over all `n(n-1)/2` edges, each run for `steps_per_edge` steps.
pub fn empirical_ic_aggregate<T: Real>(
    params: &HomeMegParams<T>,
    steps_per_edge: usize,
    seed: u64,
) -> Result<IcDistribution<f64>> {
    params.validate()?;
    let per_edge = (0..params.edge_count())
        .into_par_iter()
        .map(|e| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[e as u64]));
            gap_counts(&params.link, steps_per_edge, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let len = per_edge.iter().map(Vec::len).max().unwrap_or(1);
    let mut pooled = vec![0u64; len];
    for counts in per_edge {
        for (slot, c) in pooled.iter_mut().zip(counts) {
            *slot += c;
        }
    }
    finish(pooled)
}

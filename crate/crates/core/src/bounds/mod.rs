//! Flooding-time bounds, the phase schedule behind the stationary-case bound,
//! edge-level probability bounds, and an exact small-`n` flooding oracle.
//!
//! All logarithms are natural.

mod edge;
mod exact;

pub use edge::{
    connection_lower_bound, connection_window_cap, disconnection_bound, estimate_connection_prob,
    estimate_home_disconnection, home_disconnection_args, home_disconnection_bound,
    informal_connection_bound, Estimate,
};
pub use exact::{exact_flooding_distribution, ExactFlooding, EXACT_MAX_NODES};

use serde::{Deserialize, Serialize};

use crate::coupling::check_coupling;
use crate::error::{Error, Result};
use crate::model::{HomeMegParams, LinkParams};
use crate::scalar::Real;

/// `Lambda = 4(p+q) / (p alpha)`; equals `4 / pi(HC)`.
pub fn lambda<T: Real>(link: &LinkParams<T>) -> Result<T> {
    link.validate()?;
    let pa = link.p * link.alpha;
    if pa <= T::zero() {
        return Err(Error::LambdaUndefined);
    }
    Ok(T::lit(4.0) * (link.p + link.q) / pa)
}

/// `ln n / ln(1 + n x)`, zero for `n = 1` and `+inf` when `x = 0`.
fn log_ratio<T: Real>(n: usize, x: T) -> T {
    if n <= 1 {
        return T::zero();
    }
    let nf = T::of_usize(n);
    let denom = (nf * x).ln_1p();
    if denom <= T::zero() {
        T::infinity()
    } else {
        nf.ln() / denom
    }
}

/// `ceil(5 Lambda / n)` and `min(1/alpha, 1/(4q))`.
fn stationary_bound_sides<T: Real>(n: usize, link: &LinkParams<T>, lambda: T) -> (T, T) {
    let lhs = ceil_tol(T::lit(5.0) * lambda / T::of_usize(n));
    (lhs, connection_window_cap(link))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport<T> {
    pub n: usize,
    pub p_hat: T,
    pub q_hat: T,
    pub lambda: T,
    /// `ln n / ln(1 + n p_hat)`: the upper bound holding for any `E_0`.
    pub thm1_upper_arg: T,
    /// `ln n / ln(1 + n q_hat)`: the lower bound, in expectation.
    pub thm1_lower_arg: T,
    /// `ln n / ln(1 + n / Lambda)`: the stationary-start upper bound.
    pub thm2_arg: T,
    /// `p + q <= 1` and `gamma <= alpha`.
    pub thm1_applicable: bool,
    /// `ceil(5 Lambda / n) <= min(1/alpha, 1/(4q))`.
    pub thm2_applicable: bool,
    pub thm2_lhs: T,
    pub thm2_rhs: T,
    /// Parameters follow `alpha = n^eps/n, gamma = 1/n^2, p = 1/n^(1+eps), q = 1/n`.
    pub corollary_regime: bool,
    pub corollary_eps: Option<T>,
}

/// Relative tolerance of the sparse-regime detection.
pub const COROLLARY_RTOL: f64 = 1e-9;

fn rel_close<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(COROLLARY_RTOL) * b.abs()
}

/// Recovers `eps` when the parameters sit in the sparse regime.
pub fn corollary_eps<T: Real>(params: &HomeMegParams<T>) -> Option<T> {
    if params.n < 2 || params.link.alpha <= T::zero() {
        return None;
    }
    let nf = T::of_usize(params.n);
    let eps = (params.link.alpha * nf).ln() / nf.ln();
    if !(eps > T::zero() && eps < T::one()) {
        return None;
    }
    let reference = HomeMegParams::corollary(params.n, eps).ok()?;
    let (a, b) = (&params.link, &reference.link);
    (rel_close(a.alpha, b.alpha)
        && rel_close(a.gamma, b.gamma)
        && rel_close(a.p, b.p)
        && rel_close(a.q, b.q))
    .then_some(eps)
}

pub fn bound_report<T: Real>(params: &HomeMegParams<T>) -> Result<BoundReport<T>> {
    params.validate()?;
    let link = &params.link;
    let lambda = lambda(link)?;
    let n = params.n;
    let (p_hat, q_hat) = (link.p_hat(), link.q_hat());
    let (lhs, rhs) = stationary_bound_sides(n, link, lambda);
    let eps = corollary_eps(params);
    Ok(BoundReport {
        n,
        p_hat,
        q_hat,
        lambda,
        thm1_upper_arg: log_ratio(n, p_hat),
        thm1_lower_arg: log_ratio(n, q_hat),
        thm2_arg: log_ratio(n, T::one() / lambda),
        thm1_applicable: check_coupling(link).is_ok(),
        thm2_applicable: lhs <= rhs,
        thm2_lhs: lhs,
        thm2_rhs: rhs,
        corollary_regime: eps.is_some(),
        corollary_eps: eps,
    })
}

/// Time periods of the informed-set expansion argument.
///
/// Period 1 (bootstrap) starts at `t = 0`; period `tau` starts at
/// `t_tau = t_(tau-1) + L_(tau-1)`. The list ends at the first `tau*` with
/// `2 K^(tau*-1) ln n >= n/16`, after which a final phase of
/// `ceil(32 Lambda ln n / n)` steps reaches every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule<T> {
    /// `K = 2 max(1, n / (5 Lambda))`.
    pub k_factor: T,
    /// `L_1, L_2, ..., L_tau*`.
    pub lengths: Vec<u64>,
    /// `t_1, t_2, ..., t_tau*`.
    pub starts: Vec<u64>,
    /// `L_1 = ceil(4 Lambda ln n / n)`.
    pub bootstrap_len: u64,
    /// End of the last expansion period, `t_tau* + L_tau*`.
    pub expansion_end: u64,
    pub final_phase_len: u64,
}

impl<T> PhaseSchedule<T> {
    /// Predicted completion step: expansion periods plus the final phase.
    pub fn predicted_total(&self) -> u64 {
        self.expansion_end + self.final_phase_len
    }

    pub fn periods(&self) -> usize {
        self.lengths.len()
    }
}

/// Ceiling that treats values within a relative `1e-9` of an integer as that
/// integer, so rounding noise in `Lambda` does not add a whole step.
pub(crate) fn ceil_tol<T: Real>(x: T) -> T {
    let r = x.round();
    if (x - r).abs() <= T::lit(1e-9) * r.abs().max(T::one()) {
        r
    } else {
        x.ceil()
    }
}

fn ceil_u64<T: Real>(x: T) -> u64 {
    ceil_tol(x).to_f64_lossy().max(1.0) as u64
}

pub fn phase_schedule<T: Real>(params: &HomeMegParams<T>) -> Result<PhaseSchedule<T>> {
    params.validate()?;
    if params.n < 2 {
        return Err(Error::Precondition("phase schedule needs n >= 2".into()));
    }
    let link = &params.link;
    let lambda = lambda(link)?;
    let (lhs, rhs) = stationary_bound_sides(params.n, link, lambda);
    if lhs > rhs {
        return Err(Error::ScheduleInapplicable {
            lhs: lhs.to_f64_lossy(),
            rhs: rhs.to_f64_lossy(),
        });
    }
    let nf = T::of_usize(params.n);
    let ln_n = nf.ln();
    let two = T::lit(2.0);
    let k_factor = two * T::one().max(nf / (T::lit(5.0) * lambda));
    let slow_len = ceil_u64(T::lit(5.0) * lambda / nf);
    let bootstrap_len = ceil_u64(T::lit(4.0) * lambda * ln_n / nf);

    let target = nf / T::lit(16.0);
    let mut lengths = vec![bootstrap_len];
    let mut starts = vec![0u64];
    // tau = 1 is done; keep adding periods until 2 K^(tau-1) ln n >= n/16
    let mut k_pow = T::one(); // K^(tau-1) for the current tau
    while two * k_pow * ln_n < target {
        // next period tau + 1 uses K^(tau-1) in its length rule
        let len = if two * k_pow * ln_n >= lambda {
            1
        } else {
            slow_len
        };
        starts.push(starts.last().unwrap() + lengths.last().unwrap());
        lengths.push(len);
        k_pow = k_pow * k_factor;
    }
    let expansion_end = starts.last().unwrap() + lengths.last().unwrap();
    Ok(PhaseSchedule {
        k_factor,
        lengths,
        starts,
        bootstrap_len,
        expansion_end,
        final_phase_len: ceil_u64(T::lit(32.0) * lambda * ln_n / nf),
    })
}

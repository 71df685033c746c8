//! The single-link four-state chain and the network-level parameter set.
//!
//! Every unordered node pair carries an independent copy of the chain below.
//! The pair is either at Home (`H`) or not (`N`), and on each step it is
//! either Connected (`C`) or Disconnected (`D`):
//!
//! | from \ to | HC         | HD              | NC          | ND              |
//! |-----------|------------|-----------------|-------------|-----------------|
//! | HC, HD    | (1-q)a     | (1-q)(1-a)      | q g         | q(1-g)          |
//! | NC, ND    | p a        | p(1-a)          | (1-p) g     | (1-p)(1-g)      |
//!
//! with `a = alpha`, `g = gamma`. Rows only depend on the location of the
//! previous state, never on whether it was connected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// State of one edge chain.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeState {
    HC,
    HD,
    NC,
    ND,
}

impl EdgeState {
    /// All states in transition-matrix order.
    pub const ALL: [EdgeState; 4] = [EdgeState::HC, EdgeState::HD, EdgeState::NC, EdgeState::ND];

    /// Sampling order: connected states first, so `[0, P(connect))` is the connected region.
    pub const SAMPLING_ORDER: [EdgeState; 4] =
        [EdgeState::HC, EdgeState::NC, EdgeState::HD, EdgeState::ND];

    #[inline]
    pub fn connected(self) -> bool {
        matches!(self, EdgeState::HC | EdgeState::NC)
    }

    #[inline]
    pub fn home(self) -> bool {
        matches!(self, EdgeState::HC | EdgeState::HD)
    }

    #[inline]
    pub fn location(self) -> Location {
        if self.home() {
            Location::Home
        } else {
            Location::NonHome
        }
    }

    /// Position in transition-matrix order (HC, HD, NC, ND).
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeState::HC => "HC",
            EdgeState::HD => "HD",
            EdgeState::NC => "NC",
            EdgeState::ND => "ND",
        }
    }
}

impl std::fmt::Display for EdgeState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EdgeState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "HC" => Ok(EdgeState::HC),
            "HD" => Ok(EdgeState::HD),
            "NC" => Ok(EdgeState::NC),
            "ND" => Ok(EdgeState::ND),
            other => Err(Error::Precondition(format!("unknown edge state `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Home,
    NonHome,
}

/// The four probabilities of the single-link chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams<T> {
    /// Non-Home to Home.
    pub p: T,
    /// Home to Non-Home.
    pub q: T,
    /// Contact probability while at Home.
    pub alpha: T,
    /// Contact probability while not at Home.
    pub gamma: T,
}

fn check_prob<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange {
            name,
            value: v.to_f64_lossy(),
        })
    }
}

impl<T: Real> LinkParams<T> {
    pub fn new(p: T, q: T, alpha: T, gamma: T) -> Result<Self> {
        let link = LinkParams { p, q, alpha, gamma };
        link.validate()?;
        Ok(link)
    }

    /// Checks `0 <= p, q, alpha, gamma <= 1` and `p + q > 0`.
    pub fn validate(&self) -> Result<()> {
        check_prob("p", self.p)?;
        check_prob("q", self.q)?;
        check_prob("alpha", self.alpha)?;
        check_prob("gamma", self.gamma)?;
        if self.p + self.q <= T::zero() {
            return Err(Error::DegenerateChain);
        }
        Ok(())
    }

    /// Probability the edge is connected one step after being in `loc`:
    /// `q_hat = (1-q)alpha + q gamma` from Home, `p_hat = p alpha + (1-p)gamma` otherwise.
    #[inline]
    pub fn connect_prob(&self, loc: Location) -> T {
        let [hc, _, nc, _] = self.row(loc);
        hc + nc
    }

    /// One-step connection probability from Non-Home states.
    pub fn p_hat(&self) -> T {
        self.connect_prob(Location::NonHome)
    }

    /// One-step connection probability from Home states.
    pub fn q_hat(&self) -> T {
        self.connect_prob(Location::Home)
    }

    /// Transition row in matrix order (HC, HD, NC, ND) for a previous state at `loc`.
    #[inline]
    pub fn row(&self, loc: Location) -> [T; 4] {
        let one = T::one();
        let (a, g) = (self.alpha, self.gamma);
        match loc {
            Location::Home => {
                let stay = one - self.q;
                [stay * a, stay * (one - a), self.q * g, self.q * (one - g)]
            }
            Location::NonHome => {
                let stay = one - self.p;
                [self.p * a, self.p * (one - a), stay * g, stay * (one - g)]
            }
        }
    }

    /// The full 4x4 transition matrix, rows and columns in (HC, HD, NC, ND) order.
    pub fn transition_matrix(&self) -> [[T; 4]; 4] {
        EdgeState::ALL.map(|s| self.row(s.location()))
    }

    /// Stationary probability of being at Home, `p / (p + q)`.
    pub fn home_fraction(&self) -> T {
        self.p / (self.p + self.q)
    }
}

/// Row of the transition matrix for an edge currently in `from`.
pub fn transition_row<T: Real>(link: &LinkParams<T>, from: EdgeState) -> Result<[T; 4]> {
    link.validate()?;
    Ok(link.row(from.location()))
}

/// Stationary law of the edge chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryDist<T> {
    pub pi_hc: T,
    pub pi_hd: T,
    pub pi_nc: T,
    pub pi_nd: T,
}

impl<T: Real> StationaryDist<T> {
    /// Matrix order (HC, HD, NC, ND).
    pub fn as_array(&self) -> [T; 4] {
        [self.pi_hc, self.pi_hd, self.pi_nc, self.pi_nd]
    }

    pub fn prob(&self, s: EdgeState) -> T {
        self.as_array()[s.index()]
    }

    /// Stationary probability the edge exists.
    pub fn connected(&self) -> T {
        self.pi_hc + self.pi_nc
    }

    pub fn home(&self) -> T {
        self.pi_hc + self.pi_hd
    }

    /// `max_j |(pi M)_j - pi_j|`.
    pub fn fixed_point_residual(&self, link: &LinkParams<T>) -> T {
        let pi = self.as_array();
        let m = link.transition_matrix();
        (0..4)
            .map(|j| {
                let pushed = (0..4).fold(T::zero(), |acc, i| acc + pi[i] * m[i][j]);
                (pushed - pi[j]).abs()
            })
            .fold(T::zero(), T::max)
    }
}

/// Closed-form stationary law `(p a, p(1-a), q g, q(1-g)) / (p + q)`.
pub fn stationary<T: Real>(link: &LinkParams<T>) -> Result<StationaryDist<T>> {
    link.validate()?;
    let one = T::one();
    let (p, q, a, g) = (link.p, link.q, link.alpha, link.gamma);
    let z = p + q;
    Ok(StationaryDist {
        pi_hc: p * a / z,
        pi_hd: p * (one - a) / z,
        pi_nc: q * g / z,
        pi_nd: q * (one - g) / z,
    })
}

/// Inverse-CDF sampler over the layout `[HC, NC, HD, ND]`.
///
/// The connected region is always `[0, hc + nc)`, which is what lets the
/// coupling module drive Erdős–Rényi graphs off the same uniforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSampler<T> {
    /// Cumulative right end of each interval in sampling order.
    cuts: [T; 4],
    /// Last state with a positive-length interval; absorbs `u` past the rounded total.
    last: EdgeState,
}

impl<T: Real> IntervalSampler<T> {
    /// Builds the sampler from a distribution given in matrix order.
    pub fn from_matrix_order(probs: [T; 4]) -> Self {
        let mut cuts = [T::zero(); 4];
        let mut acc = T::zero();
        let mut last = EdgeState::SAMPLING_ORDER[0];
        for (slot, s) in EdgeState::SAMPLING_ORDER.iter().enumerate() {
            let w = probs[s.index()];
            acc = acc + w;
            cuts[slot] = acc;
            if w > T::zero() {
                last = *s;
            }
        }
        IntervalSampler { cuts, last }
    }

    /// Right end of the connected region.
    #[inline]
    pub fn connect_cut(&self) -> T {
        self.cuts[1]
    }

    #[inline]
    pub fn sample(&self, u: T) -> EdgeState {
        // u falls in the first interval whose right end exceeds it; such an
        // interval necessarily has positive length.
        for (slot, &cut) in self.cuts.iter().enumerate() {
            if u < cut {
                return EdgeState::SAMPLING_ORDER[slot];
            }
        }
        self.last
    }
}

/// Precomputed samplers for the two distinct transition rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTable<T> {
    home: IntervalSampler<T>,
    non_home: IntervalSampler<T>,
}

impl<T: Real> StepTable<T> {
    pub fn new(link: &LinkParams<T>) -> Self {
        StepTable {
            home: IntervalSampler::from_matrix_order(link.row(Location::Home)),
            non_home: IntervalSampler::from_matrix_order(link.row(Location::NonHome)),
        }
    }

    #[inline]
    pub fn sampler(&self, loc: Location) -> &IntervalSampler<T> {
        match loc {
            Location::Home => &self.home,
            Location::NonHome => &self.non_home,
        }
    }

    #[inline]
    pub fn step(&self, from: EdgeState, u: T) -> EdgeState {
        self.sampler(from.location()).sample(u)
    }
}

/// Advances one edge with the uniform `u` in `[0, 1]`.
pub fn step_edge<T: Real>(link: &LinkParams<T>, from: EdgeState, u: T) -> Result<EdgeState> {
    link.validate()?;
    if !(u >= T::zero() && u <= T::one()) {
        return Err(Error::Precondition(format!(
            "uniform {u} is outside [0, 1]"
        )));
    }
    Ok(StepTable::new(link).step(from, u))
}

/// Parameters of a whole Home-MEG on `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomeMegParams<T> {
    pub n: usize,
    #[serde(flatten)]
    pub link: LinkParams<T>,
}

impl<T: Real> HomeMegParams<T> {
    pub fn new(n: usize, p: T, q: T, alpha: T, gamma: T) -> Result<Self> {
        Self::from_link(n, LinkParams::new(p, q, alpha, gamma)?)
    }

    pub fn from_link(n: usize, link: LinkParams<T>) -> Result<Self> {
        let params = HomeMegParams { n, link };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::NoNodes);
        }
        self.link.validate()
    }

    /// The sparse regime `alpha = n^eps / n, gamma = 1/n^2, p = 1/n^(1+eps), q = 1/n`.
    pub fn corollary(n: usize, eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::Precondition(format!(
                "eps = {eps} must lie in (0, 1)"
            )));
        }
        let nf = T::of_usize(n);
        let one = T::one();
        Self::new(
            n,
            one / nf.powf(one + eps),
            one / nf,
            nf.powf(eps) / nf,
            one / (nf * nf),
        )
    }

    pub fn edge_count(&self) -> usize {
        edge_count(self.n)
    }
}

/// Number of unordered pairs on `n` nodes.
#[inline]
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

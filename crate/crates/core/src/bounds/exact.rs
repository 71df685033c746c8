//! Exact completion-time law for tiny networks by dynamic programming over
//! (edge-state vector, informed set).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flooding::{check_source, flood_step_by, NodeSet};
use crate::graph::InitMode;
use crate::model::{stationary, EdgeState, HomeMegParams};
use crate::scalar::Real;

pub const EXACT_MAX_NODES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFlooding<T> {
    /// `pmf[t] = P(T = t)` for `t = 0..=horizon`.
    pub pmf: Vec<T>,
    /// `P(T > horizon)`.
    pub censored: T,
}

impl<T: Real> ExactFlooding<T> {
    pub fn total_mass(&self) -> T {
        self.pmf.iter().fold(self.censored, |a, &b| a + b)
    }

    /// `E[min(T, horizon)]`, counting censored runs at the horizon.
    pub fn truncated_mean(&self) -> T {
        let horizon = T::of_usize(self.pmf.len() - 1);
        self.pmf
            .iter()
            .enumerate()
            .fold(self.censored * horizon, |acc, (t, &w)| {
                acc + T::of_usize(t) * w
            })
    }

    /// Second moment of `min(T, horizon)`.
    pub fn truncated_second_moment(&self) -> T {
        let horizon = T::of_usize(self.pmf.len() - 1);
        self.pmf
            .iter()
            .enumerate()
            .fold(self.censored * horizon * horizon, |acc, (t, &w)| {
                let t = T::of_usize(t);
                acc + t * t * w
            })
    }
}

fn informed_mask(set: &NodeSet) -> usize {
    set.ones().fold(0, |m, v| m | (1 << v))
}

pub fn exact_flooding_distribution<T: Real>(
    params: &HomeMegParams<T>,
    source: usize,
    init: &InitMode,
    horizon: u64,
) -> Result<ExactFlooding<T>> {
    params.validate()?;
    let n = params.n;
    if n > EXACT_MAX_NODES {
        return Err(Error::Capacity {
            n,
            max: EXACT_MAX_NODES,
        });
    }
    check_source(n, source)?;
    let horizon = horizon as usize;
    let mut pmf = vec![T::zero(); horizon + 1];
    if n == 1 {
        pmf[0] = T::one();
        return Ok(ExactFlooding {
            pmf,
            censored: T::zero(),
        });
    }

    let m = params.edge_count();
    let n_edge_vecs = 4usize.pow(m as u32);
    let n_sets = 1usize << n;
    let full = n_sets - 1;
    let digit = |vec: usize, e: usize| (vec >> (2 * e)) & 3;

    // initial edge-vector law
    let mut edge_law = vec![T::zero(); n_edge_vecs];
    match init {
        InitMode::Stationary => {
            let pi = stationary(&params.link)?.as_array();
            for (v, w) in edge_law.iter_mut().enumerate() {
                *w = (0..m).fold(T::one(), |acc, e| acc * pi[digit(v, e)]);
            }
        }
        InitMode::AllState(s) => {
            let v = (0..m).fold(0, |acc, e| acc | (s.index() << (2 * e)));
            edge_law[v] = T::one();
        }
        InitMode::Explicit(states) => {
            if states.len() != m {
                return Err(Error::Shape {
                    expected: m,
                    got: states.len(),
                });
            }
            let v = states
                .iter()
                .enumerate()
                .fold(0, |acc, (e, s)| acc | (s.index() << (2 * e)));
            edge_law[v] = T::one();
        }
    }

    // connected-edge mask of each edge vector, and flooding lookup per (edge mask, informed set)
    let conn_mask: Vec<usize> = (0..n_edge_vecs)
        .map(|v| {
            (0..m)
                .filter(|&e| EdgeState::from_index(digit(v, e)).is_some_and(EdgeState::connected))
                .fold(0, |acc, e| acc | (1 << e))
        })
        .collect();
    let flood: Vec<usize> = (0..(1usize << m))
        .flat_map(|edges| {
            (0..n_sets).map(move |set| {
                let mut informed = NodeSet::with_capacity(n);
                (0..n)
                    .filter(|v| set >> v & 1 == 1)
                    .for_each(|v| informed.insert(v));
                informed_mask(&flood_step_by(&informed, n, |id| edges >> id & 1 == 1))
            })
        })
        .collect();

    let matrix = params.link.transition_matrix();
    let mut dist = vec![T::zero(); n_edge_vecs * n_sets];
    for (v, &w) in edge_law.iter().enumerate() {
        dist[v * n_sets + (1 << source)] = w;
    }
    let mut scratch = vec![T::zero(); dist.len()];

    for slot in pmf.iter_mut().skip(1) {
        // edges move independently: apply the 4x4 kernel one coordinate at a time
        for e in 0..m {
            scratch.iter_mut().for_each(|x| *x = T::zero());
            let shift = 2 * e;
            for v in 0..n_edge_vecs {
                let d = digit(v, shift / 2);
                let base = v & !(3 << shift);
                for set in 0..n_sets {
                    let w = dist[v * n_sets + set];
                    if w == T::zero() {
                        continue;
                    }
                    for (d2, &prob) in matrix[d].iter().enumerate() {
                        let target = (base | (d2 << shift)) * n_sets + set;
                        scratch[target] = scratch[target] + w * prob;
                    }
                }
            }
            std::mem::swap(&mut dist, &mut scratch);
        }
        // then inform along the new edges
        scratch.iter_mut().for_each(|x| *x = T::zero());
        for v in 0..n_edge_vecs {
            let row = conn_mask[v] * n_sets;
            for set in 0..n_sets {
                let w = dist[v * n_sets + set];
                if w == T::zero() {
                    continue;
                }
                let next = flood[row + set];
                if next == full {
                    *slot = *slot + w;
                } else {
                    let target = v * n_sets + next;
                    scratch[target] = scratch[target] + w;
                }
            }
        }
        std::mem::swap(&mut dist, &mut scratch);
    }
    let censored = dist.iter().fold(T::zero(), |a, &b| a + b);
    Ok(ExactFlooding { pmf, censored })
}

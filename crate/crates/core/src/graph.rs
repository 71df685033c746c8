//! Whole-graph snapshots and their evolution.

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    edge_count, stationary, EdgeState, HomeMegParams, IntervalSampler, LinkParams, StepTable,
};
use crate::scalar::Real;
use crate::uniforms::EdgeUniforms;

/// Id of the unordered pair `{u, v}`: `v(v-1)/2 + u` for `u < v`.
#[inline]
pub fn edge_id(u: usize, v: usize) -> usize {
    debug_assert_ne!(u, v);
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    v * (v - 1) / 2 + u
}

/// Inverse of [`edge_id`], returning `(u, v)` with `u < v`.
pub fn edge_pair(id: usize) -> (usize, usize) {
    let mut v = ((1.0 + (1.0 + 8.0 * id as f64).sqrt()) / 2.0) as usize;
    // float sqrt can land one off near perfect squares
    while v * (v - 1) / 2 > id {
        v -= 1;
    }
    while (v + 1) * v / 2 <= id {
        v += 1;
    }
    (id - v * (v - 1) / 2, v)
}

/// Iterates `(id, u, v)` over all pairs of `n` nodes in id order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (1..n)
        .flat_map(|v| (0..v).map(move |u| (u, v)))
        .enumerate()
        .map(|(id, (u, v))| (id, u, v))
}

/// States of every edge at one time step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub n: usize,
    pub t: u64,
    pub states: Vec<EdgeState>,
}

impl GraphSnapshot {
    pub fn new(n: usize, t: u64, states: Vec<EdgeState>) -> Result<Self> {
        let expected = edge_count(n);
        if states.len() != expected {
            return Err(Error::Shape {
                expected,
                got: states.len(),
            });
        }
        Ok(GraphSnapshot { n, t, states })
    }

    pub fn uniform(n: usize, state: EdgeState) -> Self {
        GraphSnapshot {
            n,
            t: 0,
            states: vec![state; edge_count(n)],
        }
    }

    #[inline]
    pub fn is_connected(&self, u: usize, v: usize) -> bool {
        self.states[edge_id(u, v)].connected()
    }

    /// The edge set `E_t` as a bitmask over edge ids.
    pub fn connected_edges(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.states.len());
        for (id, s) in self.states.iter().enumerate() {
            if s.connected() {
                set.insert(id);
            }
        }
        set
    }

    pub fn connected_count(&self) -> usize {
        self.states.iter().filter(|s| s.connected()).count()
    }
}

/// How edge states at `t = 0` are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    /// Each edge independently from the stationary law.
    Stationary,
    /// Every edge in the same state.
    AllState(EdgeState),
    Explicit(Vec<EdgeState>),
}

/// Sampler for the stationary law with the same `[HC, NC, HD, ND]` layout as the step rows.
pub fn stationary_sampler<T: Real>(link: &LinkParams<T>) -> Result<IntervalSampler<T>> {
    Ok(IntervalSampler::from_matrix_order(
        stationary(link)?.as_array(),
    ))
}

/// Draws `E_0`. Stationary edges consume `U_0(e)`.
pub fn sample_initial<T: Real>(
    params: &HomeMegParams<T>,
    mode: &InitMode,
    uniforms: &mut EdgeUniforms,
) -> Result<GraphSnapshot> {
    params.validate()?;
    let m = params.edge_count();
    match mode {
        InitMode::Stationary => {
            let sampler = stationary_sampler(&params.link)?;
            let mut buf = vec![0.0; m];
            uniforms.fill_step(0, &mut buf);
            let states = buf
                .iter()
                .map(|&u| sampler.sample(T::unit_from_f64(u)))
                .collect();
            GraphSnapshot::new(params.n, 0, states)
        }
        InitMode::AllState(s) => Ok(GraphSnapshot::uniform(params.n, *s)),
        InitMode::Explicit(states) => GraphSnapshot::new(params.n, 0, states.clone()),
    }
}

/// Reusable stepping machinery for one parameter set.
#[derive(Debug, Clone)]
pub struct Evolver<T> {
    table: StepTable<T>,
    buf: Vec<f64>,
}

impl<T: Real> Evolver<T> {
    pub fn new(params: &HomeMegParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Evolver {
            table: StepTable::new(&params.link),
            buf: vec![0.0; params.edge_count()],
        })
    }

    pub fn table(&self) -> &StepTable<T> {
        &self.table
    }

    /// Uniforms `U_{t+1}(e)` of the step about to be taken from `snapshot`.
    pub fn draw(&mut self, snapshot: &GraphSnapshot, uniforms: &mut EdgeUniforms) -> &[f64] {
        self.buf.resize(snapshot.states.len(), 0.0);
        uniforms.fill_step(snapshot.t + 1, &mut self.buf);
        &self.buf
    }

    /// Moves `snapshot` from `t` to `t + 1` in place.
    pub fn advance(&mut self, snapshot: &mut GraphSnapshot, uniforms: &mut EdgeUniforms) {
        self.buf.resize(snapshot.states.len(), 0.0);
        uniforms.fill_step(snapshot.t + 1, &mut self.buf);
        let table = self.table;
        for (s, &u) in snapshot.states.iter_mut().zip(&self.buf) {
            *s = table.step(*s, T::unit_from_f64(u));
        }
        snapshot.t += 1;
    }
}

/// Returns the snapshot one step later; edge `e` consumes `U_{t+1}(e)`.
pub fn evolve<T: Real>(
    snapshot: &GraphSnapshot,
    params: &HomeMegParams<T>,
    uniforms: &mut EdgeUniforms,
) -> Result<GraphSnapshot> {
    if snapshot.n != params.n || snapshot.states.len() != params.edge_count() {
        return Err(Error::Shape {
            expected: params.edge_count(),
            got: snapshot.states.len(),
        });
    }
    let mut next = snapshot.clone();
    Evolver::new(params)?.advance(&mut next, uniforms);
    Ok(next)
}

/// Draws a state from the stationary law with an ordinary RNG.
pub fn draw_stationary<T: Real, R: Rng + ?Sized>(
    sampler: &IntervalSampler<T>,
    rng: &mut R,
) -> EdgeState {
    sampler.sample(T::unit_from_f64(rng.random::<f64>()))
}

/// A single edge chain driven by an ordinary RNG, for long one-edge runs.
#[derive(Debug)]
pub struct EdgeChain<'r, T, R: ?Sized> {
    table: StepTable<T>,
    state: EdgeState,
    rng: &'r mut R,
}

impl<'r, T: Real, R: Rng + ?Sized> EdgeChain<'r, T, R> {
    pub fn new(link: &LinkParams<T>, start: EdgeState, rng: &'r mut R) -> Self {
        EdgeChain {
            table: StepTable::new(link),
            state: start,
            rng,
        }
    }

    pub fn state(&self) -> EdgeState {
        self.state
    }
}

impl<T: Real, R: Rng + ?Sized> Iterator for EdgeChain<'_, T, R> {
    type Item = EdgeState;

    /// Yields the state after each step.
    fn next(&mut self) -> Option<EdgeState> {
        let u = T::unit_from_f64(self.rng.random::<f64>());
        self.state = self.table.step(self.state, u);
        Some(self.state)
    }
}

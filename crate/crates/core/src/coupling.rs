//! Shared-uniform coupling of `G^p ⊆ H ⊆ G^q`.
//!
//! `G^p` and `G^q` are sequences of independent Erdős–Rényi graphs with edge
//! probabilities `p_hat` and `q_hat`. Every edge of all three processes is
//! updated from the same `U_t(e)`: the ER edges exist iff `U < p_hat` (resp.
//! `U < q_hat`), and the Home-MEG edge lands in its connected region
//! `[0, connect_prob(row))`. Since that right end is `p_hat` from Non-Home and
//! `q_hat` from Home, the nesting holds for every realisation.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flooding::{check_source, flood_step_edges, Completion, FloodRun};
use crate::graph::{stationary_sampler, GraphSnapshot};
use crate::model::{HomeMegParams, LinkParams, StepTable};
use crate::scalar::Real;
use crate::uniforms::EdgeUniforms;

/// Checks `p + q <= 1` and `gamma <= alpha`.
pub fn check_coupling<T: Real>(link: &LinkParams<T>) -> Result<()> {
    link.validate()?;
    if link.p + link.q > T::one() {
        return Err(Error::CouplingInapplicable(format!(
            "p + q = {} > 1",
            link.p + link.q
        )));
    }
    if link.gamma > link.alpha {
        return Err(Error::CouplingInapplicable(format!(
            "gamma = {} > alpha = {}",
            link.gamma, link.alpha
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState<T> {
    pub meg: GraphSnapshot,
    /// Edges of `G^p`.
    pub er_p_edges: FixedBitSet,
    /// Edges of `G^q`.
    pub er_q_edges: FixedBitSet,
    pub p_hat: T,
    pub q_hat: T,
}

impl<T: Real> CoupledState<T> {
    /// Draws `H`'s `E_0` from the stationary law and both ER graphs from the same `U_0(e)`.
    ///
    /// The stationary connect probability lies between `p_hat` and `q_hat`, so
    /// the initial graphs are nested as well.
    pub fn stationary(params: &HomeMegParams<T>, uniforms: &mut EdgeUniforms) -> Result<Self> {
        params.validate()?;
        check_coupling(&params.link)?;
        let (p_hat, q_hat) = (params.link.p_hat(), params.link.q_hat());
        let sampler = stationary_sampler(&params.link)?;
        // Equalities that hold exactly in the reals may be off by an ulp here.
        let lo = p_hat.min(q_hat).min(sampler.connect_cut());
        let hi = q_hat.max(p_hat).max(sampler.connect_cut());
        let m = params.edge_count();
        let mut buf = vec![0.0; m];
        uniforms.fill_step(0, &mut buf);
        let mut er_p = FixedBitSet::with_capacity(m);
        let mut er_q = FixedBitSet::with_capacity(m);
        let mut states = Vec::with_capacity(m);
        for (e, &u) in buf.iter().enumerate() {
            let u = T::unit_from_f64(u);
            states.push(sampler.sample(u));
            er_p.set(e, u < lo);
            er_q.set(e, u < hi);
        }
        Ok(CoupledState {
            meg: GraphSnapshot::new(params.n, 0, states)?,
            er_p_edges: er_p,
            er_q_edges: er_q,
            p_hat,
            q_hat,
        })
    }

    /// Number of edges violating `E(G^p) ⊆ E(H) ⊆ E(G^q)`.
    pub fn sandwich_violations(&self) -> usize {
        self.meg
            .states
            .iter()
            .enumerate()
            .filter(|&(e, s)| {
                let h = s.connected();
                (self.er_p_edges.contains(e) && !h) || (h && !self.er_q_edges.contains(e))
            })
            .count()
    }

    pub fn meg_edges(&self) -> FixedBitSet {
        self.meg.connected_edges()
    }
}

/// Reusable coupled stepping for one parameter set.
#[derive(Debug, Clone)]
pub struct CoupledStepper<T> {
    table: StepTable<T>,
    lo: T,
    hi: T,
    buf: Vec<f64>,
}

impl<T: Real> CoupledStepper<T> {
    pub fn new(params: &HomeMegParams<T>) -> Result<Self> {
        params.validate()?;
        check_coupling(&params.link)?;
        let (p_hat, q_hat) = (params.link.p_hat(), params.link.q_hat());
        Ok(CoupledStepper {
            table: StepTable::new(&params.link),
            lo: p_hat.min(q_hat),
            hi: q_hat.max(p_hat),
            buf: vec![0.0; params.edge_count()],
        })
    }

    pub fn advance(&mut self, state: &mut CoupledState<T>, uniforms: &mut EdgeUniforms) {
        let m = state.meg.states.len();
        self.buf.resize(m, 0.0);
        uniforms.fill_step(state.meg.t + 1, &mut self.buf);
        for (e, (s, &u)) in state.meg.states.iter_mut().zip(&self.buf).enumerate() {
            let u = T::unit_from_f64(u);
            *s = self.table.step(*s, u);
            state.er_p_edges.set(e, u < self.lo);
            state.er_q_edges.set(e, u < self.hi);
        }
        state.meg.t += 1;
    }
}

/// Advances all three processes by one step with the shared uniforms `U_{t+1}(e)`.
pub fn coupled_step<T: Real>(
    state: &CoupledState<T>,
    params: &HomeMegParams<T>,
    uniforms: &mut EdgeUniforms,
) -> Result<CoupledState<T>> {
    if state.meg.n != params.n || state.meg.states.len() != params.edge_count() {
        return Err(Error::Shape {
            expected: params.edge_count(),
            got: state.meg.states.len(),
        });
    }
    let mut next = state.clone();
    CoupledStepper::new(params)?.advance(&mut next, uniforms);
    Ok(next)
}

/// Flooding runs on the three coupled processes plus invariant bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRuns {
    pub er_p: FloodRun,
    pub meg: FloodRun,
    pub er_q: FloodRun,
    /// Edge-level nesting violations summed over all steps.
    pub edge_violations: usize,
    /// Steps where `I_t(G^p) ⊆ I_t(H) ⊆ I_t(G^q)` failed.
    pub informed_violations: usize,
}

impl CoupledRuns {
    /// `T_q <= T_H <= T_p` with censored runs treated as `+inf`.
    pub fn times_ordered(&self) -> bool {
        let (tp, th, tq) = (
            self.er_p.completion.as_extended(),
            self.meg.completion.as_extended(),
            self.er_q.completion.as_extended(),
        );
        tq <= th && th <= tp
    }

    pub fn times(&self) -> [Completion; 3] {
        [
            self.er_p.completion,
            self.meg.completion,
            self.er_q.completion,
        ]
    }
}

/// Floods `G^p`, `H` and `G^q` from `source` on one coupled trajectory.
///
/// Stepping continues until all three are complete or `horizon` is reached.
pub fn coupled_flooding<T: Real>(
    params: &HomeMegParams<T>,
    source: usize,
    horizon: u64,
    uniforms: &mut EdgeUniforms,
) -> Result<CoupledRuns> {
    params.validate()?;
    check_coupling(&params.link)?;
    check_source(params.n, source)?;
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let n = params.n;
    let (mut run_p, mut inf_p) = FloodRun::start(n, source);
    let (mut run_h, mut inf_h) = FloodRun::start(n, source);
    let (mut run_q, mut inf_q) = FloodRun::start(n, source);
    let mut out = CoupledRuns {
        er_p: run_p.clone(),
        meg: run_h.clone(),
        er_q: run_q.clone(),
        edge_violations: 0,
        informed_violations: 0,
    };
    if n == 1 {
        return Ok(out);
    }
    let mut state = CoupledState::stationary(params, uniforms)?;
    let mut stepper = CoupledStepper::new(params)?;
    out.edge_violations += state.sandwich_violations();
    for t in 1..=horizon {
        stepper.advance(&mut state, uniforms);
        out.edge_violations += state.sandwich_violations();
        let meg_edges = state.meg_edges();
        if !run_p.is_done() {
            inf_p = flood_step_edges(&inf_p, n, &state.er_p_edges);
            run_p.record(t, &inf_p, n);
        }
        if !run_h.is_done() {
            inf_h = flood_step_edges(&inf_h, n, &meg_edges);
            run_h.record(t, &inf_h, n);
        }
        if !run_q.is_done() {
            inf_q = flood_step_edges(&inf_q, n, &state.er_q_edges);
            run_q.record(t, &inf_q, n);
        }
        if !(inf_p.is_subset(&inf_h) && inf_h.is_subset(&inf_q)) {
            out.informed_violations += 1;
        }
        if run_p.is_done() && run_h.is_done() && run_q.is_done() {
            break;
        }
    }
    out.er_p = run_p;
    out.meg = run_h;
    out.er_q = run_q;
    Ok(out)
}

/// Outcome of a batch of coupled trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledTrial {
    pub trial: usize,
    pub t_p: Completion,
    pub t_h: Completion,
    pub t_q: Completion,
    pub edge_violations: usize,
    pub informed_violations: usize,
    pub ordered: bool,
}

impl From<(usize, &CoupledRuns)> for CoupledTrial {
    fn from((trial, r): (usize, &CoupledRuns)) -> Self {
        CoupledTrial {
            trial,
            t_p: r.er_p.completion,
            t_h: r.meg.completion,
            t_q: r.er_q.completion,
            edge_violations: r.edge_violations,
            informed_violations: r.informed_violations,
            ordered: r.times_ordered(),
        }
    }
}

/// Runs `trials` independent coupled flooding trials in parallel.
pub fn coupled_trials<T: Real>(
    params: &HomeMegParams<T>,
    source: usize,
    horizon: u64,
    trials: usize,
    seed: u64,
) -> Result<Vec<CoupledTrial>> {
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut u = EdgeUniforms::for_trial(seed, k as u64);
            coupled_flooding(params, source, horizon, &mut u).map(|r| CoupledTrial::from((k, &r)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::evolve;
    use crate::model::{EdgeState, Location};

    #[test]
    fn hypotheses_enforced() {
        let bad = HomeMegParams::<f64>::new(5, 0.6, 0.6, 0.5, 0.1).unwrap();
        assert!(matches!(
            CoupledState::stationary(&bad, &mut EdgeUniforms::new(0)),
            Err(Error::CouplingInapplicable(_))
        ));
        let bad = HomeMegParams::<f64>::new(5, 0.1, 0.1, 0.1, 0.5).unwrap();
        assert!(matches!(
            coupled_flooding(&bad, 0, 10, &mut EdgeUniforms::new(0)),
            Err(Error::CouplingInapplicable(_))
        ));
    }

    #[test]
    fn degenerate_sandwich() {
        // p = q and alpha = gamma: p_hat = q_hat = alpha and the three graphs coincide.
        let params = HomeMegParams::<f64>::new(12, 0.2, 0.2, 0.35, 0.35).unwrap();
        let mut u = EdgeUniforms::new(5);
        let mut state = CoupledState::stationary(&params, &mut u).unwrap();
        assert_eq!(state.p_hat, state.q_hat);
        for _ in 0..20 {
            state = coupled_step(&state, &params, &mut u).unwrap();
            let h = state.meg_edges();
            assert_eq!(state.er_p_edges, h);
            assert_eq!(state.er_q_edges, h);
        }
        let runs = coupled_flooding(&params, 0, 1000, &mut EdgeUniforms::new(6)).unwrap();
        assert_eq!(runs.er_p.completion, runs.meg.completion);
        assert_eq!(runs.er_q.completion, runs.meg.completion);
    }

    #[test]
    fn per_edge_nesting_on_a_grid() {
        let links = [
            LinkParams::<f64>::new(0.1, 0.1, 0.5, 0.05).unwrap(),
            LinkParams::<f64>::new(0.3, 0.7, 0.9, 0.0).unwrap(),
            LinkParams::<f64>::new(0.0, 0.2, 1.0, 1.0).unwrap(),
            LinkParams::<f64>::new(7.5e-5, 3.3e-3, 0.18, 7.8e-3).unwrap(),
        ];
        for link in links {
            let table = StepTable::new(&link);
            let (p_hat, q_hat) = (link.p_hat(), link.q_hat());
            for prior in [EdgeState::HD, EdgeState::ND] {
                for i in 0..10_000 {
                    let u = i as f64 / 10_000.0;
                    let h = table.step(prior, u).connected();
                    if u < p_hat {
                        assert!(h, "{link:?} {prior} {u}");
                    }
                    if h {
                        assert!(u < q_hat, "{link:?} {prior} {u}");
                    }
                }
            }
            assert_eq!(table.sampler(Location::Home).connect_cut(), q_hat);
            assert_eq!(table.sampler(Location::NonHome).connect_cut(), p_hat);
        }
    }

    #[test]
    fn meg_part_matches_plain_evolution() {
        let params = HomeMegParams::<f64>::new(15, 0.1, 0.2, 0.6, 0.1).unwrap();
        let mut u1 = EdgeUniforms::new(77);
        let mut u2 = EdgeUniforms::new(77);
        let mut coupled = CoupledState::stationary(&params, &mut u1).unwrap();
        let mut plain =
            crate::graph::sample_initial(&params, &crate::graph::InitMode::Stationary, &mut u2)
                .unwrap();
        assert_eq!(coupled.meg, plain);
        for _ in 0..10 {
            coupled = coupled_step(&coupled, &params, &mut u1).unwrap();
            plain = evolve(&plain, &params, &mut u2).unwrap();
            assert_eq!(coupled.meg, plain);
        }
    }

    #[test]
    fn single_node_trivial() {
        let params = HomeMegParams::<f64>::new(1, 0.1, 0.1, 0.5, 0.05).unwrap();
        let runs = coupled_flooding(&params, 0, 10, &mut EdgeUniforms::new(0)).unwrap();
        assert_eq!(runs.times(), [Completion::Completed(0); 3]);
        assert!(runs.times_ordered());
    }
}

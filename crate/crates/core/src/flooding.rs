//! The flooding process: `I_0 = {s}`, `I_{t+1} = I_t ∪ N_{t+1}(I_t)`.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::lambda;
use crate::error::{Error, Result};
use crate::graph::{sample_initial, Evolver, GraphSnapshot, InitMode};
use crate::model::HomeMegParams;
use crate::scalar::Real;
use crate::stats::Summary;
use crate::uniforms::{derive_seed, EdgeUniforms};

/// Set of nodes as a bitmask.
pub type NodeSet = FixedBitSet;

pub fn singleton(n: usize, node: usize) -> NodeSet {
    let mut set = NodeSet::with_capacity(n);
    set.insert(node);
    set
}

/// One flooding round over an arbitrary edge predicate indexed by edge id.
pub fn flood_step_by(
    informed: &NodeSet,
    n: usize,
    mut has_edge: impl FnMut(usize) -> bool,
) -> NodeSet {
    let mut next = informed.clone();
    let mut id = 0;
    for v in 1..n {
        let v_in = informed.contains(v);
        for u in 0..v {
            if informed.contains(u) != v_in && has_edge(id) {
                next.insert(if v_in { u } else { v });
            }
            id += 1;
        }
    }
    next
}

/// `I_t ∪ {v : {u, v} connected in snapshot for some u ∈ I_t}`.
pub fn flood_step(informed: &NodeSet, snapshot: &GraphSnapshot) -> NodeSet {
    flood_step_by(informed, snapshot.n, |id| snapshot.states[id].connected())
}

/// Same as [`flood_step`] over an edge bitmask.
pub fn flood_step_edges(informed: &NodeSet, n: usize, edges: &FixedBitSet) -> NodeSet {
    flood_step_by(informed, n, |id| edges.contains(id))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completion {
    /// First `t` with `|I_t| = n`.
    Completed(u64),
    /// Not complete after this many steps.
    Censored(u64),
}

impl Completion {
    pub fn time(self) -> Option<u64> {
        match self {
            Completion::Completed(t) => Some(t),
            Completion::Censored(_) => None,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Completion::Censored(_))
    }

    /// Completion time, or the horizon for a censored run.
    pub fn time_or_horizon(self) -> u64 {
        match self {
            Completion::Completed(t) | Completion::Censored(t) => t,
        }
    }

    /// Orders censored runs after every completed one.
    pub fn as_extended(self) -> f64 {
        match self {
            Completion::Completed(t) => t as f64,
            Completion::Censored(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloodRun {
    pub source: usize,
    /// `|I_0|, |I_1|, ...` up to completion or the horizon.
    pub informed_sizes: Vec<usize>,
    pub completion: Completion,
    pub informed_final: NodeSet,
}

impl FloodRun {
    /// Starts a run at `I_0 = {source}`.
    pub(crate) fn start(n: usize, source: usize) -> (Self, NodeSet) {
        let informed = singleton(n, source);
        let completion = if n == 1 {
            Completion::Completed(0)
        } else {
            Completion::Censored(0)
        };
        let run = FloodRun {
            source,
            informed_sizes: vec![1],
            completion,
            informed_final: informed.clone(),
        };
        (run, informed)
    }

    pub fn is_done(&self) -> bool {
        !self.completion.is_censored()
    }

    /// Records `I_t`; marks completion when it covers all `n` nodes.
    pub(crate) fn record(&mut self, t: u64, informed: &NodeSet, n: usize) {
        let size = informed.count_ones(..);
        self.informed_sizes.push(size);
        self.informed_final = informed.clone();
        self.completion = if size == n {
            Completion::Completed(t)
        } else {
            Completion::Censored(t)
        };
    }
}

pub(crate) fn check_source(n: usize, source: usize) -> Result<()> {
    if source >= n {
        return Err(Error::NodeOutOfRange { node: source, n });
    }
    Ok(())
}

/// Runs the flooding process on a freshly sampled Home-MEG trajectory.
///
/// `E_{t+1}` is produced from `E_t` and then used to inform `I_{t+1}`, so the
/// first informing round is `t = 1`.
pub fn run_flooding<T: Real>(
    params: &HomeMegParams<T>,
    source: usize,
    init: &InitMode,
    horizon: u64,
    uniforms: &mut EdgeUniforms,
) -> Result<FloodRun> {
    params.validate()?;
    check_source(params.n, source)?;
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let n = params.n;
    let (mut run, mut informed) = FloodRun::start(n, source);
    if run.is_done() {
        return Ok(run);
    }
    let mut snapshot = sample_initial(params, init, uniforms)?;
    let mut evolver = Evolver::new(params)?;
    for t in 1..=horizon {
        evolver.advance(&mut snapshot, uniforms);
        informed = flood_step(&informed, &snapshot);
        run.record(t, &informed, n);
        if run.is_done() {
            break;
        }
    }
    Ok(run)
}

/// Default censoring horizon `64 * ceil(log2 n) * max(1, ceil(5 Lambda / n))`.
pub fn default_horizon<T: Real>(params: &HomeMegParams<T>) -> u64 {
    let n = params.n.max(1);
    let log2n = (n as f64).log2().ceil().max(1.0);
    let factor = match lambda(&params.link) {
        Ok(l) => crate::bounds::ceil_tol(5.0 * l.to_f64_lossy() / n as f64).max(1.0),
        Err(_) => 1.0,
    };
    let h = 64.0 * log2n * factor;
    if h.is_finite() && h < 1e12 {
        h as u64
    } else {
        1_000_000_000_000
    }
}

/// Which sources to flood from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sources {
    All,
    List(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub source: usize,
    pub trial: usize,
    /// Completion time, or the horizon when censored.
    pub completion_time: u64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceStats {
    pub source: usize,
    /// Statistics of completion times, censored runs counted at the horizon.
    pub summary: Summary,
    pub censored_count: usize,
}

/// Monte Carlo flooding-time estimate over sources and trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloodStats {
    pub n: usize,
    pub trials_per_source: usize,
    pub horizon: u64,
    /// True when only part of `[n]` was used as sources.
    pub sources_sampled: bool,
    pub records: Vec<TrialRecord>,
    pub per_source: Vec<SourceStats>,
    /// All trials pooled.
    pub pooled: Summary,
    pub censored_count: usize,
    /// Largest per-source mean completion time.
    pub worst_source_mean: f64,
    /// Largest completion time over all trials.
    pub max_time: u64,
}

impl FloodStats {
    pub fn times(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.completion_time as f64)
            .collect()
    }
}

/// Trial `trial` from `source` uses the field seeded by `(seed, source, trial)`.
pub fn trial_uniforms(seed: u64, source: usize, trial: usize) -> EdgeUniforms {
    EdgeUniforms::new(derive_seed(seed, &[source as u64, trial as u64]))
}

pub fn flooding_time_estimate<T: Real>(
    params: &HomeMegParams<T>,
    init: &InitMode,
    horizon: u64,
    trials_per_source: usize,
    sources: &Sources,
    seed: u64,
) -> Result<FloodStats> {
    params.validate()?;
    if trials_per_source == 0 {
        return Err(Error::Precondition(
            "trials_per_source must be at least 1".into(),
        ));
    }
    let n = params.n;
    let source_list: Vec<usize> = match sources {
        Sources::All => (0..n).collect(),
        Sources::List(list) => {
            for &s in list {
                check_source(n, s)?;
            }
            list.clone()
        }
    };
    let sampled = source_list.len() < n;
    let jobs: Vec<(usize, usize)> = source_list
        .iter()
        .flat_map(|&s| (0..trials_per_source).map(move |k| (s, k)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(source, trial)| {
            let mut u = trial_uniforms(seed, source, trial);
            run_flooding(params, source, init, horizon, &mut u).map(|run| TrialRecord {
                source,
                trial,
                completion_time: run.completion.time_or_horizon(),
                censored: run.completion.is_censored(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let per_source: Vec<SourceStats> = source_list
        .iter()
        .map(|&s| {
            let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.source == s).collect();
            let times: Vec<f64> = mine.iter().map(|r| r.completion_time as f64).collect();
            SourceStats {
                source: s,
                summary: Summary::of(&times),
                censored_count: mine.iter().filter(|r| r.censored).count(),
            }
        })
        .collect();
    let times: Vec<f64> = records.iter().map(|r| r.completion_time as f64).collect();
    Ok(FloodStats {
        n,
        trials_per_source,
        horizon,
        sources_sampled: sampled,
        censored_count: records.iter().filter(|r| r.censored).count(),
        worst_source_mean: per_source
            .iter()
            .map(|s| s.summary.mean)
            .fold(f64::NEG_INFINITY, f64::max),
        max_time: records.iter().map(|r| r.completion_time).max().unwrap_or(0),
        pooled: Summary::of(&times),
        per_source,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_id;
    use crate::model::{edge_count, EdgeState};

    fn snapshot_with(n: usize, edges: &[(usize, usize)]) -> GraphSnapshot {
        let mut snap = GraphSnapshot::uniform(n, EdgeState::ND);
        for &(u, v) in edges {
            snap.states[edge_id(u, v)] = EdgeState::NC;
        }
        snap
    }

    fn set(n: usize, nodes: &[usize]) -> NodeSet {
        let mut s = NodeSet::with_capacity(n);
        nodes.iter().for_each(|&v| s.insert(v));
        s
    }

    #[test]
    fn step_without_edges() {
        let snap = snapshot_with(5, &[]);
        assert_eq!(flood_step(&set(5, &[0]), &snap), set(5, &[0]));
    }

    #[test]
    fn step_complete_graph() {
        let mut snap = GraphSnapshot::uniform(5, EdgeState::HC);
        snap.t = 1;
        assert_eq!(flood_step(&set(5, &[0]), &snap).count_ones(..), 5);
    }

    #[test]
    fn step_uses_only_previous_informed_set() {
        // 1-2 is an edge out of I_t; 2-3 must not chain in the same round.
        let snap = snapshot_with(4, &[(1, 2), (2, 3)]);
        assert_eq!(flood_step(&set(4, &[0, 1]), &snap), set(4, &[0, 1, 2]));
    }

    #[test]
    fn single_node_completes_at_zero() {
        let params = HomeMegParams::<f64>::new(1, 0.1, 0.1, 0.1, 0.1).unwrap();
        let run = run_flooding(
            &params,
            0,
            &InitMode::Stationary,
            10,
            &mut EdgeUniforms::new(0),
        )
        .unwrap();
        assert_eq!(run.completion, Completion::Completed(0));
        assert_eq!(run.informed_sizes, vec![1]);
    }

    #[test]
    fn always_connected_completes_at_one() {
        for n in [2, 3, 17] {
            let params = HomeMegParams::<f64>::new(n, 0.3, 0.6, 1.0, 1.0).unwrap();
            let run = run_flooding(
                &params,
                n - 1,
                &InitMode::AllState(EdgeState::ND),
                5,
                &mut EdgeUniforms::new(1),
            )
            .unwrap();
            assert_eq!(run.completion, Completion::Completed(1));
            assert_eq!(run.informed_sizes, vec![1, n]);
        }
    }

    #[test]
    fn never_connected_is_censored() {
        let params = HomeMegParams::<f64>::new(4, 0.3, 0.6, 0.0, 0.0).unwrap();
        let run = run_flooding(
            &params,
            0,
            &InitMode::Stationary,
            7,
            &mut EdgeUniforms::new(1),
        )
        .unwrap();
        assert_eq!(run.completion, Completion::Censored(7));
        assert_eq!(run.informed_sizes.len(), 8);
    }

    #[test]
    fn bad_inputs() {
        let params = HomeMegParams::<f64>::new(4, 0.3, 0.6, 0.5, 0.1).unwrap();
        let mut u = EdgeUniforms::new(1);
        assert_eq!(
            run_flooding(&params, 4, &InitMode::Stationary, 7, &mut u).unwrap_err(),
            Error::NodeOutOfRange { node: 4, n: 4 }
        );
        assert_eq!(
            run_flooding(&params, 0, &InitMode::Stationary, 0, &mut u).unwrap_err(),
            Error::ZeroHorizon
        );
    }

    #[test]
    fn sizes_monotone_and_final_consistent() {
        let params = HomeMegParams::<f64>::new(40, 0.05, 0.1, 0.3, 0.01).unwrap();
        for seed in 0..5 {
            let run = run_flooding(
                &params,
                3,
                &InitMode::Stationary,
                500,
                &mut EdgeUniforms::new(seed),
            )
            .unwrap();
            assert_eq!(run.informed_sizes[0], 1);
            assert!(run.informed_sizes.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(
                *run.informed_sizes.last().unwrap(),
                run.informed_final.count_ones(..)
            );
            if let Completion::Completed(t) = run.completion {
                assert_eq!(run.informed_sizes.len() as u64, t + 1);
                assert_eq!(run.informed_final.count_ones(..), 40);
            }
        }
    }

    #[test]
    fn estimate_single_node() {
        let params = HomeMegParams::<f64>::new(1, 0.1, 0.1, 0.1, 0.1).unwrap();
        let stats = flooding_time_estimate(&params, &InitMode::Stationary, 10, 5, &Sources::All, 0)
            .unwrap();
        assert!(stats
            .records
            .iter()
            .all(|r| r.completion_time == 0 && !r.censored));
        assert_eq!(stats.max_time, 0);
    }

    #[test]
    fn estimate_is_deterministic_and_flags_sampling() {
        let params = HomeMegParams::<f64>::new(12, 0.1, 0.1, 0.4, 0.05).unwrap();
        let a = flooding_time_estimate(
            &params,
            &InitMode::Stationary,
            200,
            4,
            &Sources::List(vec![0, 5]),
            11,
        )
        .unwrap();
        let b = flooding_time_estimate(
            &params,
            &InitMode::Stationary,
            200,
            4,
            &Sources::List(vec![0, 5]),
            11,
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.sources_sampled);
        assert_eq!(a.records.len(), 8);
        assert_eq!(a.per_source.len(), 2);
    }

    #[test]
    fn default_horizon_formula() {
        // MIT Cell: Lambda = 1000, n = 100 -> 64 * 7 * 50
        let params = HomeMegParams::<f64>::new(100, 7.5e-5, 3.3e-3, 0.18, 7.8e-3).unwrap();
        assert_eq!(default_horizon(&params), 64 * 7 * 50);
        let params = HomeMegParams::<f64>::new(1, 0.5, 0.5, 1.0, 1.0).unwrap();
        // Lambda = 8: 64 * 1 * 40
        assert_eq!(default_horizon(&params), 64 * 40);
        assert_eq!(edge_count(1), 0);
    }
}

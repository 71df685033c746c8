//! Monte Carlo checks of the simulators against closed forms and the exact oracle.

use homemeg::bounds::exact_flooding_distribution;
use homemeg::coupling::{coupled_trials, CoupledState, CoupledStepper};
use homemeg::flooding::{flooding_time_estimate, Sources};
use homemeg::graph::{sample_initial, Evolver};
use homemeg::intercontact::empirical_ic_aggregate;
use homemeg::intercontact::ic_pmf;
use homemeg::model::{stationary, step_edge, EdgeState, HomeMegParams, LinkParams};
use homemeg::presets::preset_by_name;
use homemeg::{EdgeUniforms, InitMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn within(observed: f64, expected: f64, trials: usize, k: f64) -> bool {
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    (observed - expected).abs() <= k * sigma + 1e-12
}

#[test]
fn step_frequencies_match_rows() {
    let link = LinkParams::<f64>::new(0.15, 0.35, 0.6, 0.08).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 1_000_000;
    for from in [EdgeState::HD, EdgeState::NC] {
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[step_edge(&link, from, rng.random::<f64>()).unwrap().index()] += 1;
        }
        let row = link.row(from.location());
        for j in 0..4 {
            assert!(
                within(counts[j] as f64 / trials as f64, row[j], trials, 4.0),
                "{from} -> {j}"
            );
        }
    }
}

#[test]
fn evolved_graph_stays_stationary() {
    let params = HomeMegParams::<f64>::new(50, 0.1, 0.2, 0.4, 0.05).unwrap();
    let pi = stationary(&params.link).unwrap().as_array();
    let mut u = EdgeUniforms::new(2);
    let mut snap = sample_initial(&params, &InitMode::Stationary, &mut u).unwrap();
    let mut ev = Evolver::new(&params).unwrap();
    let mut counts = [0usize; 4];
    let steps = 400;
    for _ in 0..steps {
        ev.advance(&mut snap, &mut u);
        for s in &snap.states {
            counts[s.index()] += 1;
        }
    }
    let total = (steps * params.edge_count()) as f64;
    for j in 0..4 {
        assert!((counts[j] as f64 / total - pi[j]).abs() < 0.01, "state {j}");
    }
}

#[test]
fn initial_home_fraction_mit_cell() {
    let link = preset_by_name("mit-cell").unwrap().link;
    let params = HomeMegParams::from_link(100, link).unwrap();
    let snap = sample_initial(&params, &InitMode::Stationary, &mut EdgeUniforms::new(3)).unwrap();
    let home = snap.states.iter().filter(|s| s.home()).count() as f64 / snap.states.len() as f64;
    let p_h = link.p / (link.p + link.q);
    assert!(within(home, p_h, snap.states.len(), 3.0), "{home} vs {p_h}");
}

#[test]
fn flooding_mean_matches_exact_oracle() {
    let params = HomeMegParams::<f64>::new(3, 0.2, 0.3, 0.5, 0.1).unwrap();
    let horizon = 400;
    let exact = exact_flooding_distribution(&params, 1, &InitMode::Stationary, horizon).unwrap();
    assert!(exact.censored < 1e-12);
    let mean = exact.truncated_mean();
    let var = exact.truncated_second_moment() - mean * mean;
    let trials = 20_000;
    let stats = flooding_time_estimate(
        &params,
        &InitMode::Stationary,
        horizon,
        trials,
        &Sources::List(vec![1]),
        4,
    )
    .unwrap();
    let sem = (var / trials as f64).sqrt();
    assert!(
        (stats.pooled.mean - mean).abs() < 3.0 * sem,
        "{} vs {mean}",
        stats.pooled.mean
    );
}

#[test]
fn three_node_mean_at_reference_parameters() {
    let params = HomeMegParams::<f64>::new(3, 0.5, 0.5, 0.9, 0.1).unwrap();
    let exact = exact_flooding_distribution(&params, 0, &InitMode::Stationary, 300).unwrap();
    let mean = exact.truncated_mean();
    let sd = (exact.truncated_second_moment() - mean * mean).sqrt();
    let trials = 100_000;
    let stats = flooding_time_estimate(
        &params,
        &InitMode::Stationary,
        300,
        trials,
        &Sources::List(vec![0]),
        8,
    )
    .unwrap();
    assert!((stats.pooled.mean - mean).abs() < 3.0 * sd / (trials as f64).sqrt());
}

#[test]
fn equal_connect_probabilities_give_identical_coupled_times() {
    let params = HomeMegParams::<f64>::new(20, 0.2, 0.3, 0.15, 0.15).unwrap();
    for t in coupled_trials(&params, 3, 500, 30, 9).unwrap() {
        assert_eq!(t.t_p, t.t_h);
        assert_eq!(t.t_h, t.t_q);
    }
}

#[test]
fn sources_are_exchangeable() {
    let params = HomeMegParams::<f64>::new(8, 0.1, 0.2, 0.5, 0.05).unwrap();
    let stats = flooding_time_estimate(
        &params,
        &InitMode::Stationary,
        2000,
        4000,
        &Sources::List(vec![0, 5]),
        5,
    )
    .unwrap();
    let (a, b) = (&stats.per_source[0].summary, &stats.per_source[1].summary);
    let se = (a.sem().powi(2) + b.sem().powi(2)).sqrt();
    assert!(
        (a.mean - b.mean).abs() < 4.0 * se,
        "{} vs {}",
        a.mean,
        b.mean
    );
}

#[test]
fn coupled_lower_graph_has_density_p_hat() {
    let params = HomeMegParams::<f64>::new(40, 0.1, 0.1, 0.5, 0.05).unwrap();
    let mut u = EdgeUniforms::new(6);
    let mut state = CoupledState::stationary(&params, &mut u).unwrap();
    let mut stepper = CoupledStepper::new(&params).unwrap();
    let (mut lo, mut hi) = (0usize, 0usize);
    let steps = 200;
    for _ in 0..steps {
        stepper.advance(&mut state, &mut u);
        lo += state.er_p_edges.count_ones(..);
        hi += state.er_q_edges.count_ones(..);
    }
    let total = steps * params.edge_count();
    assert!(within(
        lo as f64 / total as f64,
        params.link.p_hat(),
        total,
        3.0
    ));
    assert!(within(
        hi as f64 / total as f64,
        params.link.q_hat(),
        total,
        3.0
    ));
}

#[test]
fn pooled_inter_contact_matches_analytic() {
    let params = HomeMegParams::<f64>::new(6, 0.2, 0.3, 0.7, 0.1).unwrap();
    let emp = empirical_ic_aggregate(&params, 200_000, 7).unwrap();
    let analytic = ic_pmf(&params.link, 40).unwrap();
    assert!(analytic.tv_truncated(&emp, 40) < 0.01);
}

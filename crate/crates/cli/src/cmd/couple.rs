use homemeg::coupling::{check_coupling, coupled_trials};
use homemeg::flooding::default_horizon;
use homemeg::Completion;
use serde::Serialize;

use super::envelope;
use crate::args::CoupleArgs;
use crate::config::resolve_seed;
use crate::output::{ensure_dir, in_dir, write_csv, write_json, CliError};

#[derive(Debug, Serialize)]
struct Row {
    trial: usize,
    t_p: u64,
    t_h: u64,
    t_q: u64,
    censored_p: bool,
    censored_h: bool,
    censored_q: bool,
    edge_violations: usize,
    informed_violations: usize,
    ordered: bool,
}

#[derive(Debug, Serialize)]
struct Body {
    n: usize,
    p_hat: f64,
    q_hat: f64,
    horizon: u64,
    trials: usize,
    mean_t_p: f64,
    mean_t_h: f64,
    mean_t_q: f64,
    edge_violations: usize,
    informed_violations: usize,
    unordered_trials: usize,
    csv: &'static str,
}

fn mean(xs: impl Iterator<Item = Completion>) -> f64 {
    let v: Vec<f64> = xs.map(|c| c.time_or_horizon() as f64).collect();
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

pub fn run(args: CoupleArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let params = args.net.params(args.n)?;
    check_coupling(&params.link)?;
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(&params));
    ensure_dir(&args.out)?;
    let trials = coupled_trials(&params, args.source, horizon, args.trials, seed)?;
    let rows = trials.iter().map(|t| Row {
        trial: t.trial,
        t_p: t.t_p.time_or_horizon(),
        t_h: t.t_h.time_or_horizon(),
        t_q: t.t_q.time_or_horizon(),
        censored_p: t.t_p.is_censored(),
        censored_h: t.t_h.is_censored(),
        censored_q: t.t_q.is_censored(),
        edge_violations: t.edge_violations,
        informed_violations: t.informed_violations,
        ordered: t.ordered,
    });
    write_csv(&in_dir(&args.out, "couple.csv"), rows)?;
    let body = Body {
        n: args.n,
        p_hat: params.link.p_hat(),
        q_hat: params.link.q_hat(),
        horizon,
        trials: trials.len(),
        mean_t_p: mean(trials.iter().map(|t| t.t_p)),
        mean_t_h: mean(trials.iter().map(|t| t.t_h)),
        mean_t_q: mean(trials.iter().map(|t| t.t_q)),
        edge_violations: trials.iter().map(|t| t.edge_violations).sum(),
        informed_violations: trials.iter().map(|t| t.informed_violations).sum(),
        unordered_trials: trials.iter().filter(|t| !t.ordered).count(),
        csv: "couple.csv",
    };
    println!(
        "mean T_q={:.3} T_H={:.3} T_p={:.3}; violations: edges {}, informed {}, order {}",
        body.mean_t_q,
        body.mean_t_h,
        body.mean_t_p,
        body.edge_violations,
        body.informed_violations,
        body.unordered_trials
    );
    write_json(
        &in_dir(&args.out, "couple_summary.json"),
        &envelope("couple", Some(seed), &args, body),
    )
}

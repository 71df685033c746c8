use homemeg::bounds::{
    connection_lower_bound, connection_window_cap, estimate_connection_prob,
    estimate_home_disconnection, exact_flooding_distribution, home_disconnection_bound, lambda,
    EXACT_MAX_NODES,
};
use homemeg::coupling::coupled_trials;
use homemeg::flooding::{default_horizon, flooding_time_estimate, Sources};
use homemeg::model::{HomeMegParams, LinkParams};
use homemeg::uniforms::derive_seed;
use homemeg::InitMode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::envelope;
use crate::args::{Check, VerifyArgs};
use crate::config::resolve_seed;
use crate::output::{write_json, CliError};

/// Oracle runs stop here unless `--horizon` says otherwise.
const ORACLE_HORIZON_CAP: u64 = 400;

#[derive(Debug, Serialize)]
struct WindowRow {
    l: u32,
    estimate: f64,
    sigma: f64,
    bound: f64,
    ok: bool,
}

#[derive(Debug, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
enum Findings {
    Lemma1 {
        trials: usize,
        rows: Vec<WindowRow>,
    },
    LambdaLb {
        trials: usize,
        lambda: f64,
        rows: Vec<WindowRow>,
    },
    Coupling {
        n: usize,
        trials: usize,
        edge_violations: usize,
        informed_violations: usize,
        unordered_trials: usize,
    },
    Oracle {
        n: usize,
        trials: usize,
        horizon: u64,
        tv: f64,
        tv_tol: f64,
        exact_mean: f64,
        mc_mean: f64,
    },
}

#[derive(Debug, Serialize)]
struct Body {
    link: LinkParams<f64>,
    passed: bool,
    violations: usize,
    findings: Findings,
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let (link, passed, violations, findings) = match args.check {
        Check::Lemma1 => lemma1(&args, seed)?,
        Check::LambdaLb => lambda_lb(&args, seed)?,
        Check::Coupling => coupling(&args, seed)?,
        Check::Oracle => oracle(&args, seed)?,
    };
    let body = Body {
        link,
        passed,
        violations,
        findings,
    };
    if let Some(path) = &args.out {
        write_json(path, &envelope("verify", Some(seed), &args, &body))?;
    }
    if passed {
        println!("{:?}: ok", args.check);
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{:?}: {violations} violation(s)",
            args.check
        )))
    }
}

type Verdict = (LinkParams<f64>, bool, usize, Findings);

fn print_rows(rows: &[WindowRow], relation: &str) {
    for r in rows {
        println!(
            "l={:>3} estimate={:.6} sigma={:.2e} {relation} {:.6} {}",
            r.l,
            r.estimate,
            r.sigma,
            r.bound,
            if r.ok { "ok" } else { "VIOLATED" }
        );
    }
}

fn lemma1(args: &VerifyArgs, seed: u64) -> Result<Verdict, CliError> {
    let link = args.model.link_or([0.05, 0.1, 0.3, 0.01])?;
    let trials = args.trials.unwrap_or(200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1]));
    let rows: Vec<WindowRow> = estimate_home_disconnection(&link, args.lmax, trials, &mut rng)?
        .into_iter()
        .map(|e| {
            let bound = home_disconnection_bound(&link, e.l);
            WindowRow {
                l: e.l,
                estimate: e.estimate,
                sigma: e.sigma,
                bound,
                ok: e.estimate <= bound + args.sigmas * e.sigma,
            }
        })
        .collect();
    print_rows(&rows, "<=");
    let bad = rows.iter().filter(|r| !r.ok).count();
    Ok((link, bad == 0, bad, Findings::Lemma1 { trials, rows }))
}

fn lambda_lb(args: &VerifyArgs, seed: u64) -> Result<Verdict, CliError> {
    let link = args.model.link_or([0.05, 0.1, 0.3, 0.01])?;
    let lam = lambda(&link)?;
    let cap = connection_window_cap(&link);
    if !cap.is_finite() {
        return Err(CliError::Usage(
            "alpha = q = 0: the window is unbounded".into(),
        ));
    }
    let l_max = cap.floor() as u32;
    let trials = args.trials.unwrap_or(200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2]));
    let mut rows = Vec::new();
    for e in estimate_connection_prob(&link, l_max, trials, &mut rng)? {
        let bound = connection_lower_bound(&link, e.l)?;
        rows.push(WindowRow {
            l: e.l,
            estimate: e.estimate,
            sigma: e.sigma,
            bound,
            ok: e.estimate >= bound - args.sigmas * e.sigma,
        });
    }
    print_rows(&rows, ">=");
    let bad = rows.iter().filter(|r| !r.ok).count();
    Ok((
        link,
        bad == 0,
        bad,
        Findings::LambdaLb {
            trials,
            lambda: lam,
            rows,
        },
    ))
}

fn coupling(args: &VerifyArgs, seed: u64) -> Result<Verdict, CliError> {
    let link = args.model.link_or([0.1, 0.1, 0.5, 0.05])?;
    let n = args.n.unwrap_or(64);
    let trials = args.trials.unwrap_or(100);
    let params = HomeMegParams::from_link(n, link)?;
    let results = coupled_trials(&params, 0, default_horizon(&params), trials, seed)?;
    let edge_violations: usize = results.iter().map(|t| t.edge_violations).sum();
    let informed_violations: usize = results.iter().map(|t| t.informed_violations).sum();
    let unordered_trials = results.iter().filter(|t| !t.ordered).count();
    println!("edge violations {edge_violations}, informed violations {informed_violations}, unordered trials {unordered_trials}");
    let bad = edge_violations + informed_violations + unordered_trials;
    Ok((
        link,
        bad == 0,
        bad,
        Findings::Coupling {
            n,
            trials,
            edge_violations,
            informed_violations,
            unordered_trials,
        },
    ))
}

fn oracle(args: &VerifyArgs, seed: u64) -> Result<Verdict, CliError> {
    let link = args.model.link_or([0.5, 0.5, 0.9, 0.1])?;
    let n = args.n.unwrap_or(3);
    if n > EXACT_MAX_NODES {
        return Err(CliError::Usage(format!(
            "oracle check supports n <= {EXACT_MAX_NODES}"
        )));
    }
    let trials = args.trials.unwrap_or(100_000);
    let params = HomeMegParams::from_link(n, link)?;
    let horizon = default_horizon(&params).min(ORACLE_HORIZON_CAP);
    let exact = exact_flooding_distribution(&params, 0, &InitMode::Stationary, horizon)?;
    let stats = flooding_time_estimate(
        &params,
        &InitMode::Stationary,
        horizon,
        trials,
        &Sources::List(vec![0]),
        seed,
    )?;
    let mut mc = vec![0.0; horizon as usize + 1];
    let mut mc_censored = 0.0;
    let w = 1.0 / trials as f64;
    for r in &stats.records {
        if r.censored {
            mc_censored += w;
        } else {
            mc[r.completion_time as usize] += w;
        }
    }
    let tv = 0.5
        * (exact
            .pmf
            .iter()
            .zip(&mc)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            + (exact.censored - mc_censored).abs());
    let exact_mean = exact.truncated_mean();
    println!(
        "n={n} horizon={horizon} TV={tv:.5} (tol {}) exact mean={exact_mean:.4} MC mean={:.4}",
        args.tv_tol, stats.pooled.mean
    );
    let ok = tv < args.tv_tol;
    Ok((
        link,
        ok,
        usize::from(!ok),
        Findings::Oracle {
            n,
            trials,
            horizon,
            tv,
            tv_tol: args.tv_tol,
            exact_mean,
            mc_mean: stats.pooled.mean,
        },
    ))
}

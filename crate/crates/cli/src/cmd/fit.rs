use homemeg::fitting::{fit, load_trace, CcdfTrace, SearchConfig};
use serde::Serialize;

use super::envelope;
use crate::args::FitArgs;
use crate::config::resolve_seed;
use crate::output::{write_json, CliError};

/// Same columns as the published best-fit table.
#[derive(Debug, Serialize)]
struct Body<'a> {
    trace: &'a CcdfTrace,
    search: &'a SearchConfig,
    p: f64,
    q: f64,
    alpha: f64,
    gamma: f64,
    #[serde(rename = "p_H")]
    p_h: f64,
    alpha_over_gamma: f64,
    p_plus_q: f64,
    objective: f64,
    iterations: usize,
    starts_evaluated: usize,
}

pub fn run(args: FitArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let trace = load_trace(&args.trace)?;
    let search = SearchConfig {
        grid_points: args.grid_points,
        refine_starts: args.refine_starts,
        ..SearchConfig::default()
    };
    let r = fit(&trace, &search, seed)?;
    println!(
        "p={:.3e} q={:.3e} alpha={:.3e} gamma={:.3e} p_H={:.4} alpha/gamma={:.4e} p+q={:.3e} log-MSE={:.3e}",
        r.link.p, r.link.q, r.link.alpha, r.link.gamma, r.p_h, r.alpha_over_gamma, r.p_plus_q, r.objective
    );
    let body = Body {
        trace: &trace,
        search: &search,
        p: r.link.p,
        q: r.link.q,
        alpha: r.link.alpha,
        gamma: r.link.gamma,
        p_h: r.p_h,
        alpha_over_gamma: r.alpha_over_gamma,
        p_plus_q: r.p_plus_q,
        objective: r.objective,
        iterations: r.iterations,
        starts_evaluated: r.starts_evaluated,
    };
    write_json(&args.out, &envelope("fit", Some(seed), &args, body))
}

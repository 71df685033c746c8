use homemeg::bounds::{bound_report, phase_schedule, BoundReport, PhaseSchedule};
use homemeg::flooding::{default_horizon, flooding_time_estimate, SourceStats, Sources};
use homemeg::model::HomeMegParams;
use homemeg::stats::Summary;
use serde::Serialize;

use super::envelope;
use crate::args::FloodArgs;
use crate::config::resolve_seed;
use crate::output::{ensure_dir, in_dir, write_csv, write_json, CliError};

#[derive(Debug, Serialize)]
struct NResult {
    n: usize,
    params: HomeMegParams<f64>,
    horizon: u64,
    seed: u64,
    csv: String,
    sources_sampled: bool,
    pooled: Summary,
    censored_count: usize,
    worst_source_mean: f64,
    max_time: u64,
    per_source: Vec<SourceStats>,
    bounds: Option<BoundReport<f64>>,
    bounds_error: Option<String>,
    schedule: Option<PhaseSchedule<f64>>,
}

#[derive(Debug, Serialize)]
struct Body {
    results: Vec<NResult>,
}

pub fn run(args: FloodArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    ensure_dir(&args.out)?;
    let mut results = Vec::new();
    for &n in &args.n {
        let params = args.net.params(n)?;
        let horizon = args.horizon.unwrap_or_else(|| default_horizon(&params));
        let sources = if args.all_sources {
            Sources::All
        } else {
            Sources::List(args.source.clone())
        };
        // every n gets its own stream so adding sizes to a sweep leaves the others unchanged
        let n_seed = homemeg::uniforms::derive_seed(seed, &[n as u64]);
        let stats = flooding_time_estimate(
            &params,
            &args.init.mode(),
            horizon,
            args.trials,
            &sources,
            n_seed,
        )?;
        let csv = format!("flood_n{n}.csv");
        write_csv(&in_dir(&args.out, &csv), &stats.records)?;
        let (bounds, bounds_error) = match bound_report(&params) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        println!(
            "n={n} trials={} mean={:.3} median={} p95={:.2} max={} censored={}",
            stats.records.len(),
            stats.pooled.mean,
            stats.pooled.median,
            stats.pooled.p95,
            stats.max_time,
            stats.censored_count
        );
        results.push(NResult {
            n,
            params,
            horizon,
            seed: n_seed,
            csv,
            sources_sampled: stats.sources_sampled,
            pooled: stats.pooled,
            censored_count: stats.censored_count,
            worst_source_mean: stats.worst_source_mean,
            max_time: stats.max_time,
            per_source: stats.per_source,
            bounds,
            bounds_error,
            schedule: phase_schedule(&params).ok(),
        });
    }
    write_json(
        &in_dir(&args.out, "flood_summary.json"),
        &envelope("flood", Some(seed), &args, Body { results }),
    )
}

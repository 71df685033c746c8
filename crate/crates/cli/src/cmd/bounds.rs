use homemeg::bounds::{
    bound_report, connection_window_cap, home_disconnection_bound, lambda, phase_schedule,
    BoundReport, PhaseSchedule,
};
use homemeg::model::HomeMegParams;
use serde::Serialize;

use super::envelope;
use crate::args::BoundsArgs;
use crate::output::{write_json, CliError};

#[derive(Debug, Serialize)]
struct Entry {
    n: usize,
    params: HomeMegParams<f64>,
    lambda: f64,
    report: BoundReport<f64>,
    schedule: Option<PhaseSchedule<f64>>,
    schedule_error: Option<String>,
    /// `min(1/alpha, 1/(4q))`; `null` when unbounded.
    connection_window: Option<f64>,
    /// Upper bound on staying disconnected at Home for `l = 1..=10` steps.
    home_disconnection: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct Body {
    results: Vec<Entry>,
}

pub fn run(args: BoundsArgs) -> Result<(), CliError> {
    let mut results = Vec::new();
    for &n in &args.n {
        let params = args.net.params(n)?;
        let report = bound_report(&params)?;
        let (schedule, schedule_error) = match phase_schedule(&params) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let cap = connection_window_cap(&params.link);
        results.push(Entry {
            n,
            params,
            lambda: lambda(&params.link)?,
            report,
            schedule,
            schedule_error,
            connection_window: cap.is_finite().then_some(cap),
            home_disconnection: (1..=10)
                .map(|l| home_disconnection_bound(&params.link, l))
                .collect(),
        });
    }
    let out = envelope("bounds", None, &args, Body { results });
    let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    if let Some(path) = &args.out {
        write_json(path, &out)?;
    }
    Ok(())
}

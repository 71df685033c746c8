use homemeg::intercontact::{
    ccdf_at_steps, empirical_ic, ic_pmf, seconds_to_steps, IcDistribution,
};
use homemeg::model::LinkParams;
use homemeg::uniforms::derive_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::envelope;
use crate::args::IcArgs;
use crate::config::resolve_seed;
use crate::output::{ensure_dir, in_dir, write_csv, write_json, CliError};

#[derive(Debug, Serialize)]
struct Row {
    k: usize,
    pmf: f64,
    ccdf: f64,
}

#[derive(Debug, Serialize)]
struct SecondsRow {
    t_seconds: f64,
    k: usize,
    ccdf: f64,
}

#[derive(Debug, Serialize)]
struct Empirical {
    steps: usize,
    tv_truncated: f64,
    csv: &'static str,
}

#[derive(Debug, Serialize)]
struct Body {
    link: LinkParams<f64>,
    kmax: usize,
    tail_mass: f64,
    mean_lower_bound: f64,
    csv: &'static str,
    empirical: Option<Empirical>,
}

fn rows(d: &IcDistribution<f64>, kmax: usize) -> impl Iterator<Item = Row> + '_ {
    (1..=kmax).map(|k| Row {
        k,
        pmf: d.pmf_at(k),
        ccdf: d.ccdf_at(k),
    })
}

pub fn run(args: IcArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let link = args.model.link()?;
    if args.step_seconds.is_nan() || args.step_seconds <= 0.0 {
        return Err(CliError::Usage("--step-seconds must be positive".into()));
    }
    ensure_dir(&args.out)?;
    let analytic = ic_pmf(&link, args.kmax)?;
    write_csv(&in_dir(&args.out, "ic.csv"), rows(&analytic, args.kmax))?;
    if !args.times_seconds.is_empty() {
        let ks: Vec<usize> = args
            .times_seconds
            .iter()
            .map(|&t| seconds_to_steps(t, args.step_seconds))
            .collect();
        let ccdf = ccdf_at_steps(&link, &ks)?;
        let rows = args
            .times_seconds
            .iter()
            .zip(ks)
            .zip(ccdf)
            .map(|((&t_seconds, k), ccdf)| SecondsRow { t_seconds, k, ccdf });
        write_csv(&in_dir(&args.out, "ic_seconds.csv"), rows)?;
    }
    let empirical = if args.empirical {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x1c]));
        let emp = empirical_ic(&link, args.steps, &mut rng)?;
        write_csv(
            &in_dir(&args.out, "ic_empirical.csv"),
            rows(&emp, args.kmax),
        )?;
        let tv = analytic.tv_truncated(&emp, args.kmax);
        println!("empirical vs analytic TV (k <= {}) = {tv:.6}", args.kmax);
        Some(Empirical {
            steps: args.steps,
            tv_truncated: tv,
            csv: "ic_empirical.csv",
        })
    } else {
        None
    };
    let mean_lower_bound = (1..=args.kmax)
        .map(|k| k as f64 * analytic.pmf_at(k))
        .sum::<f64>();
    println!(
        "P(IC > {}) = {:.6e}, P(IC = 1) = {:.6e}",
        args.kmax,
        analytic.tail_mass,
        analytic.pmf_at(1)
    );
    write_json(
        &in_dir(&args.out, "ic_summary.json"),
        &envelope(
            "ic",
            args.empirical.then_some(seed),
            &args,
            Body {
                link,
                kmax: args.kmax,
                tail_mass: analytic.tail_mass,
                mean_lower_bound,
                csv: "ic.csv",
                empirical,
            },
        ),
    )
}

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use homemeg::model::{HomeMegParams, LinkParams};
use homemeg::presets::{preset_by_name, preset_names};
use homemeg::{EdgeState, InitMode};
use serde::Serialize;

use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "homemeg",
    version,
    about = "Home-MEG simulation, inter-contact times, fitting and bounds"
)]
#[command(args_override_self = true)]
#[command(
    after_help = "Any subcommand accepts --config FILE with `key = value` lines; explicit flags win.\n\
HOMEMEG_SEED overrides --seed.\n\
Exit codes: 0 ok, 1 verification failure, 2 usage or parameter error, 3 i/o error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo flooding completion times plus the matching bound report.
    Flood(FloodArgs),
    /// Inter-contact time distribution of a single link.
    Ic(IcArgs),
    /// Fit link parameters to an inter-contact ccdf trace.
    Fit(FitArgs),
    /// Bound report (Lambda, bound arguments, phase schedule).
    Bounds(BoundsArgs),
    /// Check a model prediction by simulation; exits 1 on violation.
    Verify(VerifyArgs),
    /// Coupled flooding on G^p, the Home-MEG and G^q.
    Couple(CoupleArgs),
}

/// Link parameters: a preset, explicit values, or both (explicit values override the preset).
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// One of mit-cell, mit-bt, infocom06, vehicular, ucsd, cambridge.
    #[arg(long)]
    pub preset: Option<String>,
    /// Home -> Non-Home probability is q, Non-Home -> Home is p.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Connection probability at Home.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Connection probability away from Home.
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl ModelArgs {
    fn is_empty(&self) -> bool {
        self.preset.is_none()
            && self.p.is_none()
            && self.q.is_none()
            && self.alpha.is_none()
            && self.gamma.is_none()
    }

    pub fn link(&self) -> Result<LinkParams<f64>, CliError> {
        let base = match &self.preset {
            Some(name) => Some(preset_by_name(name).map(|p| p.link).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset `{name}` (known: {})",
                    preset_names().collect::<Vec<_>>().join(", ")
                ))
            })?),
            None => None,
        };
        let pick = |flag: Option<f64>, from_preset: Option<f64>, name: &str| {
            flag.or(from_preset)
                .ok_or_else(|| CliError::Usage(format!("missing --{name} (or give --preset)")))
        };
        let link = LinkParams {
            p: pick(self.p, base.map(|b| b.p), "p")?,
            q: pick(self.q, base.map(|b| b.q), "q")?,
            alpha: pick(self.alpha, base.map(|b| b.alpha), "alpha")?,
            gamma: pick(self.gamma, base.map(|b| b.gamma), "gamma")?,
        };
        link.validate()?;
        Ok(link)
    }

    /// Uses `fallback` when no parameter flag was given at all.
    pub fn link_or(&self, fallback: [f64; 4]) -> Result<LinkParams<f64>, CliError> {
        if self.is_empty() {
            let [p, q, alpha, gamma] = fallback;
            return Ok(LinkParams::new(p, q, alpha, gamma)?);
        }
        self.link()
    }
}

/// Model parameters that may instead come from the sparse family.
#[derive(Debug, Clone, Args, Serialize)]
pub struct NetworkArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Use alpha = n^eps/n, gamma = 1/n^2, p = 1/n^(1+eps), q = 1/n.
    #[arg(long, conflicts_with_all = ["preset", "p", "q", "alpha", "gamma"])]
    pub corollary_eps: Option<f64>,
}

impl NetworkArgs {
    pub fn params(&self, n: usize) -> Result<HomeMegParams<f64>, CliError> {
        match self.corollary_eps {
            Some(eps) => Ok(HomeMegParams::corollary(n, eps)?),
            None => Ok(HomeMegParams::from_link(n, self.model.link()?)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitArg {
    Stationary,
    Hc,
    Hd,
    Nc,
    Nd,
}

impl InitArg {
    pub fn mode(self) -> InitMode {
        match self {
            InitArg::Stationary => InitMode::Stationary,
            InitArg::Hc => InitMode::AllState(EdgeState::HC),
            InitArg::Hd => InitMode::AllState(EdgeState::HD),
            InitArg::Nc => InitMode::AllState(EdgeState::NC),
            InitArg::Nd => InitMode::AllState(EdgeState::ND),
        }
    }
}

/// Accepts plain integers and float notation such as `1e7`.
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 {
        Ok(f as usize)
    } else {
        Err(format!("`{s}` is not a whole non-negative number"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FloodArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    /// Node counts, comma separated.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', required = true, value_parser = parse_count)]
    pub n: Vec<usize>,
    /// Trials per source.
    #[arg(long, default_value = "100", value_parser = parse_count)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Censoring horizon; defaults to 64 ceil(log2 n) max(1, ceil(5 Lambda / n)).
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long, value_enum, default_value_t = InitArg::Stationary)]
    pub init: InitArg,
    /// Flood from every node instead of --source.
    #[arg(long)]
    pub all_sources: bool,
    /// Source nodes, comma separated.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0")]
    pub source: Vec<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IcArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "1000", value_parser = parse_count)]
    pub kmax: usize,
    /// Also simulate one edge and compare.
    #[arg(long)]
    pub empirical: bool,
    /// Steps of the simulated edge.
    #[arg(long, default_value = "1e7", value_parser = parse_count)]
    pub steps: usize,
    /// Report the ccdf at these times in seconds, comma separated.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',')]
    pub times_seconds: Vec<f64>,
    #[arg(long, default_value_t = homemeg::fitting::DEFAULT_STEP_SECONDS)]
    pub step_seconds: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// CSV with header `t_seconds,ccdf`.
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, default_value = "fit.json")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 7)]
    pub grid_points: usize,
    /// Best starts refined by the simplex.
    #[arg(long, default_value_t = 10)]
    pub refine_starts: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', required = true, value_parser = parse_count)]
    pub n: Vec<usize>,
    /// Also write the report here; it always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Home disconnection probability against its closed-form upper bound.
    Lemma1,
    /// Connection probability within l steps against l / Lambda.
    LambdaLb,
    /// Pathwise nesting of the coupled processes.
    Coupling,
    /// Small-network flooding law against the exact dynamic program.
    Oracle,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    /// Defaults depend on the check: p=0.05 q=0.1 alpha=0.3 gamma=0.01 for lemma1 and lambda-lb,
    /// p=q=0.1 alpha=0.5 gamma=0.05 for coupling, p=q=0.5 alpha=0.9 gamma=0.1 for oracle.
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<usize>,
    /// Nodes for coupling (default 64) and oracle (default 3).
    #[arg(long, value_parser = parse_count)]
    pub n: Option<usize>,
    /// Largest window for lemma1.
    #[arg(long, default_value_t = 20)]
    pub lmax: u32,
    /// Allowed deviation in standard errors for the Monte Carlo checks.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
    /// Total variation tolerance for the oracle check.
    #[arg(long, default_value_t = 0.01)]
    pub tv_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoupleArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    #[arg(long, value_parser = parse_count)]
    pub n: usize,
    #[arg(long, default_value = "100", value_parser = parse_count)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e7"), Ok(10_000_000));
        assert_eq!(parse_count("12"), Ok(12));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn later_flags_override() {
        let cli = Cli::try_parse_from([
            "homemeg", "flood", "--n", "4", "--seed", "3", "--n", "8,9", "--seed", "5",
        ])
        .unwrap();
        let Command::Flood(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.seed, 5);
        assert_eq!(a.n, vec![8, 9]);
    }

    #[test]
    fn preset_with_override() {
        let m = ModelArgs {
            preset: Some("mit-cell".into()),
            p: None,
            q: Some(0.01),
            alpha: None,
            gamma: None,
        };
        let l = m.link().unwrap();
        assert_eq!((l.p, l.q, l.alpha), (7.5e-5, 0.01, 0.18));
        let missing = ModelArgs { preset: None, ..m };
        assert!(matches!(missing.link(), Err(CliError::Usage(_))));
    }
}

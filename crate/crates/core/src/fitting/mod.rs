//! Fitting link parameters to an empirical inter-contact ccdf.
//!
//! The search runs in `log10` parameter space: a coarse grid (plus a few
//! seeded random starts) is scored, then Nelder-Mead refines the best starts.

mod simplex;
mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use simplex::{Minimum, NelderMead};
pub use trace::{
    load_trace, log_mse, parse_trace, trace_from_params, CcdfTrace, DEFAULT_STEP_SECONDS,
};

use crate::error::{Error, Result};
use crate::model::LinkParams;

/// Fewest trace points accepted: one per parameter.
pub const MIN_TRACE_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid_points: usize,
    /// `log10` range of the grid on every axis.
    pub grid_log_min: f64,
    pub grid_log_max: f64,
    /// Extra log-uniform starts drawn from the seed.
    pub random_starts: usize,
    /// Number of best starts handed to the simplex.
    pub refine_starts: usize,
    /// Simplex restarts from the incumbent after the first descent.
    pub polish_rounds: usize,
    pub max_iter: usize,
    pub diameter_tol: f64,
    /// Parameters are kept inside `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_points: 7,
            grid_log_min: -7.0,
            grid_log_max: 0.0,
            random_starts: 16,
            refine_starts: 10,
            polish_rounds: 2,
            max_iter: 500,
            diameter_tol: 1e-6,
            lower: 1e-12,
            upper: 1.0 - 1e-9,
        }
    }
}

impl SearchConfig {
    fn to_link(&self, x: &[f64; 4]) -> LinkParams<f64> {
        let v = |e: f64| 10f64.powf(e).clamp(self.lower, self.upper);
        LinkParams {
            p: v(x[0]),
            q: v(x[1]),
            alpha: v(x[2]),
            gamma: v(x[3]),
        }
    }

    fn grid(&self) -> Vec<[f64; 4]> {
        let g = self.grid_points.max(1);
        let axis: Vec<f64> = (0..g)
            .map(|i| {
                if g == 1 {
                    self.grid_log_max
                } else {
                    self.grid_log_min
                        + (self.grid_log_max - self.grid_log_min) * i as f64 / (g - 1) as f64
                }
            })
            .collect();
        let mut starts = Vec::with_capacity(g.pow(4));
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    for &d in &axis {
                        starts.push([a, b, c, d]);
                    }
                }
            }
        }
        starts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub link: LinkParams<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub starts_evaluated: usize,
    pub p_h: f64,
    pub alpha_over_gamma: f64,
    pub p_plus_q: f64,
}

impl FitResult {
    pub fn new(
        link: LinkParams<f64>,
        objective: f64,
        iterations: usize,
        starts_evaluated: usize,
    ) -> Self {
        FitResult {
            p_h: link.p / (link.p + link.q),
            alpha_over_gamma: link.alpha / link.gamma,
            p_plus_q: link.p + link.q,
            link,
            objective,
            iterations,
            starts_evaluated,
        }
    }
}

fn objective(config: &SearchConfig, trace: &CcdfTrace, x: &[f64; 4]) -> f64 {
    match log_mse(&config.to_link(x), trace) {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

/// Minimises [`log_mse`] over `(p, q, alpha, gamma)`. Same inputs, same output.
pub fn fit(trace: &CcdfTrace, config: &SearchConfig, seed: u64) -> Result<FitResult> {
    trace.validate()?;
    if trace.len() < MIN_TRACE_POINTS {
        return Err(Error::TooFewPoints {
            got: trace.len(),
            required: MIN_TRACE_POINTS,
        });
    }
    let mut starts = config.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.random_starts {
        starts.push(std::array::from_fn(|_| {
            rng.random_range(config.grid_log_min..=config.grid_log_max)
        }));
    }
    let scores: Vec<f64> = starts
        .par_iter()
        .map(|x| objective(config, trace, x))
        .collect();

    let mut ranked: Vec<usize> = (0..starts.len())
        .filter(|&i| scores[i].is_finite())
        .collect();
    if ranked.is_empty() {
        return Err(Error::FitFailed);
    }
    // stable: ties keep the lower start index
    ranked.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let nm = NelderMead {
        max_iter: config.max_iter,
        diameter_tol: config.diameter_tol,
        ..NelderMead::default()
    };
    let refined: Vec<Minimum<4>> = ranked
        .iter()
        .take(config.refine_starts.max(1))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| {
            let f = |x: &[f64; 4]| objective(config, trace, x);
            let mut m = nm.minimize(f, starts[i]);
            for _ in 0..config.polish_rounds {
                let again = nm.minimize(f, m.x);
                let iterations = m.iterations + again.iterations;
                if again.value <= m.value {
                    m = again;
                }
                m.iterations = iterations;
            }
            m
        })
        .collect();

    let iterations = refined.iter().map(|m| m.iterations).sum();
    let best_grid = ranked[0];
    let mut best = (starts[best_grid], scores[best_grid]);
    for m in &refined {
        if m.value < best.1 {
            best = (m.x, m.value);
        }
    }
    Ok(FitResult::new(
        config.to_link(&best.0),
        best.1,
        iterations,
        starts.len(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SearchConfig {
        SearchConfig {
            grid_points: 4,
            random_starts: 4,
            refine_starts: 3,
            ..SearchConfig::default()
        }
    }

    fn times() -> Vec<f64> {
        (0..8).map(|i| 86.4 * 3f64.powi(i)).collect()
    }

    #[test]
    fn default_grid_size() {
        assert_eq!(SearchConfig::default().grid().len(), 2401);
    }

    #[test]
    fn too_few_points() {
        let t = CcdfTrace::new("x", vec![(86.4, 0.5), (172.8, 0.25)], 86.4).unwrap();
        assert_eq!(
            fit(&t, &small_config(), 0).unwrap_err(),
            Error::TooFewPoints {
                got: 2,
                required: 4
            }
        );
    }

    #[test]
    fn result_stays_inside_unit_box() {
        let link = LinkParams::<f64>::new(0.2, 0.3, 0.6, 0.02).unwrap();
        let trace = trace_from_params(&link, &times(), 86.4, "x").unwrap();
        let r = fit(&trace, &small_config(), 1).unwrap();
        for v in [r.link.p, r.link.q, r.link.alpha, r.link.gamma] {
            assert!(v > 0.0 && v < 1.0);
        }
        assert!((r.p_h - r.link.p / (r.link.p + r.link.q)).abs() < 1e-12);
        assert!(r.objective < 1e-3, "{r:?}");
    }

    #[test]
    fn deterministic() {
        let link = LinkParams::<f64>::new(0.01, 0.05, 0.3, 0.001).unwrap();
        let trace = trace_from_params(&link, &times(), 86.4, "x").unwrap();
        let a = fit(&trace, &small_config(), 9).unwrap();
        let b = fit(&trace, &small_config(), 9).unwrap();
        assert_eq!(a, b);
    }
}

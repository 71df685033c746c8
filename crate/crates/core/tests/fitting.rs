use homemeg::fitting::{fit, load_trace, log_mse, trace_from_params, CcdfTrace, SearchConfig};
use homemeg::intercontact::ccdf_at_steps;
use homemeg::model::LinkParams;
use homemeg::presets::preset_by_name;
use std::io::Write;

fn log_spaced_times(points: usize, max_steps: f64) -> Vec<f64> {
    let mut ks: Vec<f64> = (0..points)
        .map(|i| max_steps.powf(i as f64 / (points - 1) as f64).round())
        .collect();
    ks.dedup();
    ks.into_iter().map(|k| k * 86.4).collect()
}

#[test]
fn mit_cell_round_trip_objective() {
    let link = preset_by_name("mit-cell").unwrap().link;
    let trace = trace_from_params(&link, &log_spaced_times(10, 5000.0), 86.4, "mit").unwrap();
    assert!(log_mse(&link, &trace).unwrap() < 1e-12);
}

#[test]
fn geometric_trace_is_fitted_by_a_geometric_law() {
    let c: f64 = 0.05;
    let points: Vec<(f64, f64)> = (0..10)
        .map(|i| {
            let k = 1 + 3 * i;
            (k as f64 * 86.4, (1.0 - c).powi(k))
        })
        .collect();
    let trace = CcdfTrace::new("geometric", points, 86.4).unwrap();
    let r = fit(&trace, &SearchConfig::default(), 3).unwrap();
    assert!(r.objective < 1e-12, "{r:?}");
    // alpha = gamma is one exact solution but not the only one, so check the law itself
    let ks: Vec<usize> = (1..=100).collect();
    let model = ccdf_at_steps(&r.link, &ks).unwrap();
    for (&k, m) in ks.iter().zip(model) {
        let ratio = m / (1.0 - c).powi(k as i32);
        assert!(
            (ratio.log10()).abs() < 1e-3,
            "k = {k}, ratio {ratio}, {r:?}"
        );
    }
}

#[test]
fn fit_never_worse_than_grid_and_stays_in_box() {
    let link = LinkParams::<f64>::new(2e-3, 4e-2, 0.2, 1e-4).unwrap();
    let trace = trace_from_params(&link, &log_spaced_times(8, 3000.0), 86.4, "x").unwrap();
    let config = SearchConfig {
        grid_points: 5,
        ..SearchConfig::default()
    };
    let r = fit(&trace, &config, 11).unwrap();
    for v in [r.link.p, r.link.q, r.link.alpha, r.link.gamma] {
        assert!(v > 0.0 && v < 1.0);
    }
    // best grid value: a refinement-free search
    let grid_only = fit(
        &trace,
        &SearchConfig {
            refine_starts: 1,
            max_iter: 0,
            polish_rounds: 0,
            ..config.clone()
        },
        11,
    )
    .unwrap();
    assert!(r.objective <= grid_only.objective);
    assert!((r.p_h - r.link.p / (r.link.p + r.link.q)).abs() < 1e-12);
    assert!((r.alpha_over_gamma - r.link.alpha / r.link.gamma).abs() <= 1e-12 * r.alpha_over_gamma);
    assert!((r.p_plus_q - (r.link.p + r.link.q)).abs() < 1e-12);
}

#[test]
fn same_seed_same_fit() {
    let link = preset_by_name("cambridge").unwrap().link;
    let trace = trace_from_params(&link, &log_spaced_times(8, 2000.0), 86.4, "cam").unwrap();
    let config = SearchConfig {
        grid_points: 4,
        ..SearchConfig::default()
    };
    assert_eq!(
        fit(&trace, &config, 5).unwrap(),
        fit(&trace, &config, 5).unwrap()
    );
}

#[test]
fn load_trace_from_file() {
    let dir = std::env::temp_dir().join(format!("homemeg-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("two.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# step_seconds=120\nt_seconds,ccdf\n120,0.8\n1200,0.3").unwrap();
    let t = load_trace(&path).unwrap();
    assert_eq!(t.name, "two");
    assert_eq!(t.points, vec![(120.0, 0.8), (1200.0, 0.3)]);
    assert_eq!(t.step_seconds, 120.0);
    std::fs::remove_dir_all(&dir).unwrap();
}

use nsk_core::model::ModelParams;
use nsk_core::rate_study::{
    default_kappas, render_outputs, run_rate_study, Mode, Norm, RateStudyConfig,
};
use nsk_core::Error;

fn base(rho_b: f64) -> ModelParams {
    ModelParams {
        n: 3,
        gamma: 1.0,
        kappa: 1.0,
        mu: 1.0,
        rho_plus: 1.0,
        rho_b,
        u_minus: 0.0,
    }
}

fn assert_slopes(result: &nsk_core::rate_study::RateStudyResult, expected: &[(Norm, f64)]) {
    for (norm, want) in expected {
        let fit = result.slopes[norm];
        assert!(
            (fit.value - want).abs() <= 0.05,
            "{}: slope {} (stderr {}), expected {want}",
            norm.as_str(),
            fit.value,
            fit.stderr
        );
        assert!(fit.stderr.is_finite() && fit.stderr >= 0.0);
    }
}

fn assert_decreasing(result: &nsk_core::rate_study::RateStudyResult) {
    for norm in &result.norms {
        let e: Vec<f64> = result.rows.iter().map(|r| r.error(*norm).unwrap()).collect();
        assert!(e.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(e.windows(2).all(|w| w[1] < w[0]), "{}: {e:?}", norm.as_str());
    }
}

#[test]
fn fixed_mode_reproduces_rates() {
    let cfg = RateStudyConfig::new(Mode::Fixed, base(-1.0));
    let result = run_rate_study(&cfg).unwrap();
    assert_eq!(result.rows.len(), 7);
    assert!(result.failures.is_empty());
    let kappas: Vec<f64> = result.rows.iter().map(|r| r.kappa).collect();
    assert_eq!(kappas, default_kappas());
    assert_slopes(
        &result,
        &[(Norm::L2Value, 0.75), (Norm::L2Derivative, 0.25), (Norm::Sup, 0.5)],
    );
    assert_decreasing(&result);
}

#[test]
fn singular_mode_reproduces_rates() {
    let cfg = RateStudyConfig::new(Mode::Singular, base(-0.1));
    let result = run_rate_study(&cfg).unwrap();
    assert!(result.failures.is_empty());
    assert_slopes(
        &result,
        &[
            (Norm::L2Value, 0.75),
            (Norm::L2Derivative, 0.25),
            (Norm::Sup, 0.5),
            (Norm::L2Y, 0.5),
        ],
    );
    assert_decreasing(&result);
    // the wall value approaches the limit root
    for p in &result.profiles {
        assert!((p.rho_limit[0] - 1.101_653_135_371_864).abs() < 1e-12);
    }
}

#[test]
fn outputs_are_deterministic_and_well_formed() {
    let mut cfg = RateStudyConfig::new(Mode::Singular, base(-0.1));
    cfg.kappas = vec![0.1, 0.05, 0.02, 0.01];
    let a = render_outputs(&run_rate_study(&cfg).unwrap()).unwrap();
    let b = render_outputs(&run_rate_study(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let names: Vec<&str> = a.iter().map(|(n, _)| *n).collect();
    assert_eq!(names, ["rates.csv", "profiles.csv", "summary.json", "plot.gp"]);
    let rates = &a[0].1;
    let mut lines = rates.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kappa,l2_value,l2_derivative,sup,l2_y,iterations,nodes"
    );
    assert_eq!(lines.count(), 4);
    assert!(a[1].1.starts_with("series,kappa,r,y,rho,rho_limit\n"));
    let summary: serde_json::Value = serde_json::from_str(&a[2].1).unwrap();
    assert_eq!(summary["mode"], "singular");
    assert!(summary["slopes"]["l2_value"]["value"].is_f64());
    assert!(summary["slopes"]["l2_value"]["stderr"].is_f64());
    assert_eq!(summary["rows"].as_array().unwrap().len(), 4);
    assert!(a[3].1.contains("rates.csv") && a[3].1.contains("profiles.csv"));
    // 17 significant digits in the tables
    let first = rates.lines().nth(1).unwrap();
    assert_eq!(first.split(',').next().unwrap(), "1.0000000000000001e-1");
}

#[test]
fn failed_kappa_is_recorded_and_excluded() {
    // the finest grid exceeds the node cap
    let mut cfg = RateStudyConfig::new(Mode::Fixed, base(-1.0));
    cfg.kappas = vec![0.1, 0.08, 0.06, 0.05, 1e-4];
    cfg.grid.max_nodes = 400;
    let result = run_rate_study(&cfg).unwrap();
    assert_eq!(result.failures.len(), 1);
    assert_eq!(result.failures[0].kappa, 1e-4);
    assert!(result.failures[0].message.contains("cap"));
    assert_eq!(result.rows.len() + result.failures.len(), 5);
    for f in &result.failures {
        assert!(!result.rows.iter().any(|r| r.kappa == f.kappa));
    }
}

#[test]
fn rejects_bad_configs() {
    let mut cfg = RateStudyConfig::new(Mode::Fixed, base(-1.0));
    cfg.norms.clear();
    assert_eq!(run_rate_study(&cfg), Err(Error::NoNormsSelected));
    let mut cfg = RateStudyConfig::new(Mode::Fixed, base(-1.0));
    cfg.base.u_minus = 0.1;
    assert!(run_rate_study(&cfg).is_err());
}

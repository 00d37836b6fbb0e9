//! Vanishing-capillarity rate study: sweep `kappa`, solve the impermeable
//! problem, measure errors against the limit and fit log-log slopes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::{build_grid, sup_norm, weighted_l2_norm, Decay, GridOptions};
use crate::impermeable::solve_impermeable;
use crate::limit_profile::{integrate_profile, rescale_derivative_to_r, rescale_to_r, LimitProfile};
use crate::model::ModelParams;
use crate::stats::{fit_line, LineFit};

/// Smallest number of successful `kappa` values for a slope fit.
pub const MIN_POINTS: usize = 4;
/// Profiles are written for `r - 1 <= PROFILE_WINDOW / alpha`.
pub const PROFILE_WINDOW: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Boundary slope `rho_b` held fixed; limit is the constant `rho_+`.
    Fixed,
    /// Boundary slope `rho_b0 / sqrt(kappa)`; limit is the boundary layer.
    Singular,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Fixed => "fixed",
            Mode::Singular => "singular",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// `||rho - limit||` in `L^2(r^{n-1} dr)`.
    L2Value,
    /// `||(rho - limit)_r||` in `L^2(r^{n-1} dr)`.
    L2Derivative,
    /// Grid maximum of `|rho - limit|`.
    Sup,
    /// `||rho(1 + sqrt(kappa) y) - rho_bar(y)||` in `L^2(dy)`; singular mode only.
    L2Y,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L2Value => "l2_value",
            Norm::L2Derivative => "l2_derivative",
            Norm::Sup => "sup",
            Norm::L2Y => "l2_y",
        }
    }
}

/// Default `kappa` sweep `10^-1, 10^-1.5, ..., 10^-4`.
pub fn default_kappas() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect()
}

pub fn default_norms(mode: Mode) -> Vec<Norm> {
    match mode {
        Mode::Fixed => vec![Norm::L2Value, Norm::L2Derivative, Norm::Sup],
        Mode::Singular => vec![Norm::L2Value, Norm::L2Derivative, Norm::Sup, Norm::L2Y],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudyConfig {
    pub mode: Mode,
    /// Strictly decreasing, positive.
    pub kappas: Vec<f64>,
    /// `kappa` is ignored; `rho_b` is `rho_b0` in singular mode.
    pub base: ModelParams,
    pub norms: Vec<Norm>,
    pub grid: GridOptions,
    pub tol: f64,
    pub max_iter: usize,
}

impl RateStudyConfig {
    pub fn new(mode: Mode, base: ModelParams) -> Self {
        Self {
            mode,
            kappas: default_kappas(),
            base,
            norms: default_norms(mode),
            grid: GridOptions::default(),
            tol: 1e-12,
            max_iter: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.norms.is_empty() {
            return Err(Error::NoNormsSelected);
        }
        if self.mode == Mode::Fixed && self.norms.contains(&Norm::L2Y) {
            return Err(Error::InvalidParameter(
                "norm l2_y is only defined in singular mode".to_string(),
            ));
        }
        if self.kappas.len() < MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "kappas needs at least {MIN_POINTS} values, got {}",
                self.kappas.len()
            )));
        }
        if self.kappas.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidParameter("kappas must be positive".to_string()));
        }
        if self.kappas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "kappas must be strictly decreasing".to_string(),
            ));
        }
        if self.base.u_minus != 0.0 {
            return Err(Error::InvalidParameter(
                "rate study requires u_minus = 0".to_string(),
            ));
        }
        self.base.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub kappa: f64,
    pub l2_value: f64,
    pub l2_derivative: f64,
    pub sup: f64,
    /// Present in singular mode.
    pub l2_y: Option<f64>,
    pub iterations: usize,
    pub nodes: usize,
}

impl RateRow {
    pub fn error(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::L2Value => Some(self.l2_value),
            Norm::L2Derivative => Some(self.l2_derivative),
            Norm::Sup => Some(self.sup),
            Norm::L2Y => self.l2_y,
        }
    }
}

/// Solution near the wall for profile plots.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSample {
    pub kappa: f64,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    /// `rho_+` in fixed mode, `rho_bar((r - 1)/sqrt(kappa))` in singular mode.
    pub rho_limit: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub value: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Points used in the fit.
    pub points: usize,
    /// Largest `kappa`, when dropped as a pre-asymptotic outlier.
    pub excluded_kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kappa: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudyResult {
    pub mode: Mode,
    pub norms: Vec<Norm>,
    /// Successful solves in decreasing `kappa`.
    pub rows: Vec<RateRow>,
    pub slopes: BTreeMap<Norm, SlopeFit>,
    pub profiles: Vec<ProfileSample>,
    pub failures: Vec<Failure>,
}

struct KappaOutcome {
    row: RateRow,
    profile: ProfileSample,
}

fn solve_one(cfg: &RateStudyConfig, kappa: f64, limit: Option<&LimitProfile>) -> Result<KappaOutcome> {
    let mut params = cfg.base;
    params.kappa = kappa;
    if cfg.mode == Mode::Singular {
        params.rho_b = cfg.base.rho_b / kappa.sqrt();
    }
    params.validate()?;
    let alpha = params.alpha();
    let grid = build_grid(params.n, alpha, &cfg.grid, Decay::Exponential)?;
    let (field, report) = solve_impermeable(&params, &grid, cfg.tol, cfg.max_iter)?;
    if !report.converged {
        return Err(Error::InvalidParameter(format!(
            "no convergence in {} iterations (last update {:e})",
            report.iterations, report.final_update_sup
        )));
    }
    let rho_plus = params.rho_plus;
    let (limit_rho, limit_rho_r) = match limit {
        Some(p) => (rescale_to_r(p, kappa, &grid), rescale_derivative_to_r(p, kappa, &grid)),
        None => (vec![rho_plus; grid.len()], vec![0.0; grid.len()]),
    };
    let rho: Vec<f64> = field.phi.iter().map(|p| p + rho_plus).collect();
    let diff: Vec<f64> = rho.iter().zip(&limit_rho).map(|(a, b)| a - b).collect();
    let diff_r: Vec<f64> = field.phi_r.iter().zip(&limit_rho_r).map(|(a, b)| a - b).collect();
    let l2_y = limit.map(|_| {
        // dy = dr / sqrt(kappa)
        let s: f64 = grid.weights().iter().zip(&diff).map(|(w, d)| w * d * d).sum();
        (s / kappa.sqrt()).sqrt()
    });
    let row = RateRow {
        kappa,
        l2_value: weighted_l2_norm(&grid, &diff)?,
        l2_derivative: weighted_l2_norm(&grid, &diff_r)?,
        sup: sup_norm(&diff),
        l2_y,
        iterations: report.iterations,
        nodes: grid.len(),
    };
    let keep = grid
        .nodes()
        .iter()
        .take_while(|&&r| r - 1.0 <= PROFILE_WINDOW / alpha)
        .count();
    let profile = ProfileSample {
        kappa,
        r: grid.nodes()[..keep].to_vec(),
        rho: rho[..keep].to_vec(),
        rho_limit: limit_rho[..keep].to_vec(),
    };
    Ok(KappaOutcome { row, profile })
}

/// Solves every `kappa` in parallel; results are ordered as `cfg.kappas`.
pub fn run_rate_study(cfg: &RateStudyConfig) -> Result<RateStudyResult> {
    cfg.validate()?;
    let limit = match cfg.mode {
        Mode::Fixed => None,
        Mode::Singular => {
            let b = &cfg.base;
            let rate = crate::model::enthalpy_derivative(b.gamma, b.rho_plus).sqrt();
            Some(integrate_profile(b.gamma, b.rho_plus, b.rho_b, 60.0 / rate, 1e-12)?)
        }
    };
    let outcomes: Vec<Result<KappaOutcome>> = cfg
        .kappas
        .par_iter()
        .map(|&k| solve_one(cfg, k, limit.as_ref()))
        .collect();
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    let mut failures = Vec::new();
    for (kappa, outcome) in cfg.kappas.iter().zip(outcomes) {
        match outcome {
            Ok(o) => {
                rows.push(o.row);
                profiles.push(o.profile);
            }
            Err(e) => failures.push(Failure {
                kappa: *kappa,
                message: e.to_string(),
            }),
        }
    }
    if rows.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_POINTS,
            got: rows.len(),
        });
    }
    let slopes = fit_rates(&rows, &cfg.norms);
    Ok(RateStudyResult {
        mode: cfg.mode,
        norms: cfg.norms.clone(),
        rows,
        slopes,
        profiles,
        failures,
    })
}

/// OLS of `ln e` on `ln kappa` per norm. The largest `kappa` is dropped when
/// it lies more than three residual standard deviations off the fit of the
/// remaining points.
pub fn fit_rates(rows: &[RateRow], norms: &[Norm]) -> BTreeMap<Norm, SlopeFit> {
    let mut out = BTreeMap::new();
    for &norm in norms {
        let mut pts: Vec<(f64, f64, f64)> = rows
            .iter()
            .filter_map(|r| r.error(norm).map(|e| (r.kappa, e)))
            .filter(|(_, e)| *e > 0.0 && e.is_finite())
            .map(|(k, e)| (k, k.ln(), e.ln()))
            .collect();
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        let line = |p: &[(f64, f64, f64)]| -> Option<LineFit> {
            fit_line(&p.iter().map(|&(_, x, y)| (x, y)).collect::<Vec<_>>())
        };
        let Some(mut fit) = line(&pts) else { continue };
        let mut excluded = None;
        if pts.len() > MIN_POINTS - 1 {
            let (k0, x0, y0) = pts[0];
            if let Some(rest) = line(&pts[1..]) {
                if (y0 - rest.predict(x0)).abs() > 3.0 * rest.residual_sd {
                    fit = rest;
                    excluded = Some(k0);
                    pts.remove(0);
                }
            }
        }
        out.insert(
            norm,
            SlopeFit {
                value: fit.slope,
                stderr: fit.slope_stderr,
                intercept: fit.intercept,
                points: pts.len(),
                excluded_kappa: excluded,
            },
        );
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `kappa`, the selected norms, iteration count and node count per row.
pub fn render_rates_csv(result: &RateStudyResult) -> String {
    let mut s = String::from("kappa");
    for n in &result.norms {
        s.push(',');
        s.push_str(n.as_str());
    }
    s.push_str(",iterations,nodes\n");
    for row in &result.rows {
        s.push_str(&num(row.kappa));
        for &n in &result.norms {
            s.push(',');
            s.push_str(&row.error(n).map(num).unwrap_or_default());
        }
        let _ = writeln!(s, ",{},{}", row.iterations, row.nodes);
    }
    s
}

/// Long format: `series, kappa, r, y = (r - 1)/sqrt(kappa), rho, rho_limit`.
pub fn render_profiles_csv(result: &RateStudyResult) -> String {
    let mut s = String::from("series,kappa,r,y,rho,rho_limit\n");
    for (i, p) in result.profiles.iter().enumerate() {
        let sk = p.kappa.sqrt();
        for ((r, rho), lim) in p.r.iter().zip(&p.rho).zip(&p.rho_limit) {
            let _ = writeln!(
                s,
                "{i},{},{},{},{},{}",
                num(p.kappa),
                num(*r),
                num((r - 1.0) / sk),
                num(*rho),
                num(*lim)
            );
        }
    }
    s
}

/// `{mode, slopes: {norm: {value, stderr, ...}}, rows: [...], failures: [...]}`.
pub fn render_summary_json(result: &RateStudyResult) -> String {
    let slopes: serde_json::Map<String, serde_json::Value> = result
        .slopes
        .iter()
        .map(|(n, f)| (n.as_str().to_string(), json!(f)))
        .collect();
    let rows: Vec<serde_json::Value> = result
        .rows
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            m.insert("kappa".into(), json!(r.kappa));
            for &n in &result.norms {
                m.insert(n.as_str().into(), json!(r.error(n)));
            }
            m.insert("iterations".into(), json!(r.iterations));
            m.insert("nodes".into(), json!(r.nodes));
            serde_json::Value::Object(m)
        })
        .collect();
    let failures: Vec<serde_json::Value> = result
        .failures
        .iter()
        .map(|f| json!({"kappa": f.kappa, "error": f.message}))
        .collect();
    let doc = json!({
        "mode": result.mode.to_string(),
        "slopes": slopes,
        "rows": rows,
        "failures": failures,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("summary is valid JSON");
    text.push('\n');
    text
}

/// Gnuplot script for the log-log error plot and the profile overlay.
pub fn render_plot_gp(result: &RateStudyResult) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1200,500\n");
    s.push_str("set output 'rates.png'\n");
    s.push_str("set multiplot layout 1,2\n");
    s.push_str("set logscale xy\nset xlabel 'kappa'\nset ylabel 'error'\nset key left top\n");
    let mut plots = Vec::new();
    for (i, n) in result.norms.iter().enumerate() {
        let col = i + 2;
        plots.push(format!("'rates.csv' every ::1 using 1:{col} with linespoints title '{}'", n.as_str()));
        if let Some(f) = result.slopes.get(n) {
            plots.push(format!(
                "exp({}) * x**{} with lines dashtype 2 notitle",
                num(f.intercept),
                num(f.value)
            ));
        }
    }
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s.push_str("unset logscale\nset key right top\nset ylabel 'rho'\n");
    let count = result.profiles.len();
    match result.mode {
        Mode::Fixed => {
            s.push_str("set xlabel 'r'\n");
            let _ = writeln!(
                s,
                "plot for [i=0:{}] 'profiles.csv' every ::1 using 3:($1==i ? $5 : 1/0) with lines title sprintf('kappa %d', i)",
                count.saturating_sub(1)
            );
        }
        Mode::Singular => {
            s.push_str("set xlabel 'y'\nset xrange [0:10]\n");
            let _ = writeln!(
                s,
                "plot for [i=0:{}] 'profiles.csv' every ::1 using 4:($1==i ? $5 : 1/0) with lines title sprintf('kappa %d', i), \\\n     'profiles.csv' every ::1 using 4:($1==0 ? $6 : 1/0) with lines linewidth 2 title 'limit'",
                count.saturating_sub(1)
            );
        }
    }
    s.push_str("unset multiplot\n");
    s
}

/// `(file name, contents)` for every artifact of a study.
pub fn render_outputs(result: &RateStudyResult) -> Result<Vec<(&'static str, String)>> {
    if result.norms.is_empty() {
        return Err(Error::NoNormsSelected);
    }
    if result.rows.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    Ok(vec![
        ("rates.csv", render_rates_csv(result)),
        ("profiles.csv", render_profiles_csv(result)),
        ("summary.json", render_summary_json(result)),
        ("plot.gp", render_plot_gp(result)),
    ])
}

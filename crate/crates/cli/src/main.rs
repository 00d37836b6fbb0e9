//! `nsk`: command-line driver for the stationary Navier-Stokes-Korteweg solvers.

mod config;
mod error;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nsk_core::bessel::{bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, BesselOrder};
use nsk_core::green::{green, green_dr, green_dr_left, green_dr_right, kernel_params};
use nsk_core::grid::{build_grid, Decay};
use nsk_core::impermeable::{decay_diagnostics, solve_impermeable};
use nsk_core::inflow::solve_inflow_outflow;
use nsk_core::limit_profile::integrate_profile;
use nsk_core::model::{enthalpy_derivative, Regime};
use nsk_core::oracle::{cross_validate_with, CrossValidateOptions};
use nsk_core::rate_study::{default_kappas, default_norms, render_outputs, run_rate_study, Mode, RateStudyConfig};
use serde_json::json;

use crate::config::{parse_config, parse_config_with, RunConfig};
use crate::error::{CliError, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "nsk", version, about = "Stationary radial Navier-Stokes-Korteweg solutions on r > 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate I_nu(x) or K_nu(x).
    Bessel {
        /// Order as an integer or `k/2`.
        #[arg(long)]
        nu: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value = "i")]
        kind: Kind,
        /// Return e^{-x} I_nu(x) or e^{x} K_nu(x).
        #[arg(long)]
        scaled: bool,
    },
    /// Evaluate the Green function G(r, s) and dG/dr.
    Kernel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
    },
    /// Solve a stationary problem.
    Solve {
        #[arg(value_enum)]
        problem: Problem,
        #[arg(long)]
        config: PathBuf,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the vanishing-capillarity boundary layer.
    LimitProfile {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho_plus: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho_b0: f64,
        /// Integration range; defaults to 40 decay lengths.
        #[arg(long)]
        y_max: Option<f64>,
        #[arg(long, default_value_t = 1e-12)]
        step_control: f64,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep kappa and fit convergence rates.
    RateStudy {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate a solver against the finite-difference oracle.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[arg(long)]
        config: PathBuf,
        /// Largest accepted sup-norm difference.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    I,
    K,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    Impermeable,
    Inflow,
    Outflow,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fixed,
    Singular,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Impermeable,
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    parse_config(&read_file(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary is valid JSON"));
}

fn parse_order(text: &str) -> Result<BesselOrder, CliError> {
    let bad = || CliError::Config(format!("nu must be a nonnegative integer or k/2, got {text}"));
    let two_nu = match text.split_once('/') {
        Some((k, "2")) => k.trim().parse::<u32>().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => 2 * text.trim().parse::<u32>().map_err(|_| bad())?,
    };
    Ok(BesselOrder::new(two_nu))
}

fn run_bessel(nu: &str, x: f64, kind: Kind, scaled: bool) -> Result<(), CliError> {
    let order = parse_order(nu)?;
    let value = match (kind, scaled) {
        (Kind::I, false) => bessel_i(order, x)?,
        (Kind::I, true) => bessel_i_scaled(order, x)?,
        (Kind::K, false) => bessel_k(order, x)?,
        (Kind::K, true) => bessel_k_scaled(order, x)?,
    };
    println!("{}", num(value));
    Ok(())
}

fn run_kernel(path: &Path, r: f64, s: f64) -> Result<(), CliError> {
    let cfg = load(path)?;
    let kp = kernel_params(&cfg.model)?;
    println!("G = {}", num(green(&kp, r, s)?));
    if r == s {
        println!("dG/dr(r-) = {}", num(green_dr_left(&kp, r, s)?));
        println!("dG/dr(r+) = {}", num(green_dr_right(&kp, r, s)?));
    } else {
        println!("dG/dr = {}", num(green_dr(&kp, r, s)?));
    }
    Ok(())
}

fn non_convergence(iterations: usize, update: f64) -> CliError {
    CliError::Solver(format!(
        "fixed-point iteration did not converge in {iterations} iterations (last update {update:e})"
    ))
}

fn run_solve(problem: Problem, path: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = load(path)?;
    let params = cfg.model;
    let regime = params.regime();
    match problem {
        Problem::Impermeable if regime != Regime::Impermeable => {
            return Err(CliError::Config("impermeable requires u_minus = 0".to_string()))
        }
        Problem::Inflow if regime != Regime::Inflow => {
            return Err(CliError::Config("inflow requires u_minus > 0".to_string()))
        }
        Problem::Outflow if regime != Regime::Outflow => {
            return Err(CliError::Config("outflow requires u_minus < 0".to_string()))
        }
        _ => {}
    }
    let out = out.or(cfg.out.clone());
    let alpha = params.alpha();
    if problem == Problem::Impermeable {
        let grid = build_grid(params.n, alpha, &cfg.grid, Decay::Exponential)?;
        let (field, report) = solve_impermeable(&params, &grid, cfg.tol, cfg.max_iter)?;
        let kp = kernel_params(&params)?;
        let envelope = decay_diagnostics(&field, &kp).ok().map(|(_, c)| c);
        let residual = nsk_core::impermeable::impermeable_residual(&params, &field)?;
        if let Some(out) = &out {
            let mut csv = String::from("r,rho,rho_r,phi,residual\n");
            for (i, r) in grid.nodes().iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    num(*r),
                    num(field.phi[i] + params.rho_plus),
                    num(field.phi_r[i]),
                    num(field.phi[i]),
                    num(residual[i])
                );
            }
            write_file(out, &csv)?;
        }
        print_json(&json!({
            "regime": regime.to_string(),
            "alpha": alpha,
            "nodes": grid.len(),
            "R_max": grid.r_max(),
            "iterations": report.iterations,
            "final_update_sup": report.final_update_sup,
            "ode_residual_sup": report.ode_residual_sup,
            "converged": report.converged,
            "sup_norm": field.sup_norm,
            "decay_rate_fit": field.decay_rate_fit,
            "envelope_constant": envelope,
        }));
        if !report.converged {
            return Err(non_convergence(report.iterations, report.final_update_sup));
        }
    } else {
        let grid = build_grid(params.n, alpha, &cfg.grid, Decay::Algebraic)?;
        let (sol, report) = solve_inflow_outflow(&params, &grid, cfg.tol, cfg.max_iter)?;
        if let Some(out) = &out {
            let mut csv = String::from("r,rho,rho_r,u,phi,residual\n");
            for (i, r) in grid.nodes().iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    num(*r),
                    num(sol.rho[i]),
                    num(sol.rho_r[i]),
                    num(sol.u[i]),
                    num(sol.phi[i]),
                    num(sol.residual[i])
                );
            }
            write_file(out, &csv)?;
        }
        print_json(&json!({
            "regime": regime.to_string(),
            "alpha": alpha,
            "nodes": grid.len(),
            "R_max": grid.r_max(),
            "iterations": report.iterations,
            "final_update_sup": report.final_update_sup,
            "ode_residual_sup": report.ode_residual_sup,
            "converged": report.converged,
            "rho_minus": sol.rho_minus,
            "mass_flux": sol.mass_flux,
            "mass_flux_defect": sol.mass_flux_defect(),
            "weighted_sup_phi": sol.weighted_sup_phi(),
            "weighted_sup_phi_r": sol.weighted_sup_phi_r(),
        }));
        if !report.converged {
            return Err(non_convergence(report.iterations, report.final_update_sup));
        }
    }
    Ok(())
}

fn run_limit_profile(
    gamma: f64,
    rho_plus: f64,
    rho_b0: f64,
    y_max: Option<f64>,
    step_control: f64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(CliError::Config(format!("gamma must be >= 1, got {gamma}")));
    }
    if !(rho_plus > 0.0 && rho_plus.is_finite()) {
        return Err(CliError::Config(format!("rho_plus must be positive, got {rho_plus}")));
    }
    let rate = enthalpy_derivative(gamma, rho_plus).sqrt();
    let y_max = y_max.unwrap_or(40.0 / rate);
    let profile = integrate_profile(gamma, rho_plus, rho_b0, y_max, step_control)?;
    if let Some(out) = &out {
        let mut csv = String::from("y,rho_bar,rho_bar_y\n");
        for ((y, v), d) in profile.y_nodes.iter().zip(&profile.rho_bar).zip(&profile.rho_bar_y) {
            let _ = writeln!(csv, "{},{},{}", num(*y), num(*v), num(*d));
        }
        write_file(out, &csv)?;
    }
    print_json(&json!({
        "rho_minus": profile.rho_minus_limit,
        "saddle_rate": profile.saddle_rate,
        "nodes": profile.y_nodes.len(),
        "y_max": profile.y_nodes.last(),
    }));
    Ok(())
}

/// Rayon pool sized by `NSK_THREADS`, or all cores when unset.
fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("NSK_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("NSK_THREADS must be a positive integer, got {v}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Solver(format!("cannot start thread pool: {e}")))
}

fn run_rate_study_cmd(mode: ModeArg, path: &Path, out: &Path) -> Result<(), CliError> {
    let cfg = parse_config_with(&read_file(path)?, true)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mode = match mode {
        ModeArg::Fixed => Mode::Fixed,
        ModeArg::Singular => Mode::Singular,
    };
    let study = RateStudyConfig {
        mode,
        kappas: cfg.kappas.clone().unwrap_or_else(default_kappas),
        base: cfg.model,
        norms: cfg.norms.clone().unwrap_or_else(|| default_norms(mode)),
        grid: cfg.grid,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
    };
    study.validate()?;
    let pool = thread_pool()?;
    let result = pool.install(|| run_rate_study(&study))?;
    for f in &result.failures {
        eprintln!("warning: kappa = {} excluded: {}", num(f.kappa), f.message);
    }
    let files = render_outputs(&result)?;
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    for (name, contents) in &files {
        write_file(&out.join(name), contents)?;
    }
    for (norm, fit) in &result.slopes {
        println!("{:<14} slope {} +- {}", norm.as_str(), num(fit.value), num(fit.stderr));
    }
    Ok(())
}

fn run_verify(path: &Path, tol: f64) -> Result<(), CliError> {
    let cfg = load(path)?;
    if cfg.model.regime() != Regime::Impermeable {
        return Err(CliError::Config("verify impermeable requires u_minus = 0".to_string()));
    }
    let options = CrossValidateOptions {
        grid: cfg.grid,
        ..CrossValidateOptions::default()
    };
    let cv = cross_validate_with(&cfg.model, tol, &options)?;
    println!("sup_diff = {}", num(cv.sup_diff));
    println!("{}", if cv.pass { "PASS" } else { "FAIL" });
    if cv.pass {
        Ok(())
    } else {
        Err(CliError::Solver(format!(
            "solvers disagree: sup_diff {} exceeds {}",
            num(cv.sup_diff),
            num(tol)
        )))
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bessel { nu, x, kind, scaled } => run_bessel(&nu, x, kind, scaled),
        Command::Kernel { config, r, s } => run_kernel(&config, r, s),
        Command::Solve { problem, config, out } => run_solve(problem, &config, out),
        Command::LimitProfile {
            gamma,
            rho_plus,
            rho_b0,
            y_max,
            step_control,
            out,
        } => run_limit_profile(gamma, rho_plus, rho_b0, y_max, step_control, out),
        Command::RateStudy { mode, config, out } => run_rate_study_cmd(mode, &config, &out),
        Command::Verify { target: VerifyTarget::Impermeable, config, tol } => run_verify(&config, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

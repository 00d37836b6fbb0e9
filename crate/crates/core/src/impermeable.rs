//! Impermeable wall (`u_- = 0`): Picard iteration on
//! `phi = phi_b + (1/kappa) int G(r,s) N(phi(s)) s^{n-1} ds`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::{kernel_params, KernelParams};
use crate::grid::{cumulative, sup_norm, RadialGrid};
use crate::model::{enthalpy_derivative, enthalpy_increment, ModelParams, Regime};
use crate::operator::GreenOperator;

/// Consecutive growing updates tolerated before giving up.
const GROWTH_STREAK: usize = 5;
/// Magnitude below which `|phi|` is treated as numerical noise in decay fits.
pub const DECAY_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationField {
    pub grid: RadialGrid,
    pub rho_b: f64,
    pub phi: Vec<f64>,
    pub phi_r: Vec<f64>,
    pub sup_norm: f64,
    /// Fitted exponential rate, when the field is nontrivial.
    pub decay_rate_fit: Option<f64>,
}

impl PerturbationField {
    pub fn new(grid: RadialGrid, rho_b: f64, phi: Vec<f64>, phi_r: Vec<f64>) -> Result<Self> {
        grid.check_len(phi.len())?;
        grid.check_len(phi_r.len())?;
        Ok(Self {
            sup_norm: sup_norm(&phi),
            grid,
            rho_b,
            phi,
            phi_r,
            decay_rate_fit: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub final_update_sup: f64,
    pub ode_residual_sup: f64,
    pub converged: bool,
}

/// `N(phi) = h(phi + rho_+) - h(rho_+) - h'(rho_+) phi`.
pub fn nonlinearity_impermeable(gamma: f64, rho_plus: f64, phi: f64) -> Result<f64> {
    if !(phi + rho_plus > 0.0) {
        return Err(Error::Domain {
            what: "density rho_plus + phi",
            value: phi + rho_plus,
        });
    }
    Ok(enthalpy_increment(gamma, rho_plus, phi) - enthalpy_derivative(gamma, rho_plus) * phi)
}

pub(crate) fn check_positive(grid: &RadialGrid, rho_plus: f64, phi: &[f64]) -> Result<()> {
    for (r, p) in grid.nodes().iter().zip(phi) {
        let rho = rho_plus + p;
        if !(rho > 0.0) {
            return Err(Error::Positivity { r: *r, rho });
        }
    }
    Ok(())
}

pub(crate) struct FixedPoint {
    pub phi: Vec<f64>,
    pub phi_r: Vec<f64>,
    pub iterations: usize,
    pub update: f64,
    pub converged: bool,
}

/// Iterates `phi <- phi_b + G[forcing(phi, phi_r)]` from `phi = phi_b`.
pub(crate) fn fixed_point<F>(
    op: &GreenOperator,
    rho_b: f64,
    rho_plus: f64,
    tol: f64,
    max_iter: usize,
    mut forcing: F,
) -> Result<FixedPoint>
where
    F: FnMut(&[f64], &[f64]) -> Result<Vec<f64>>,
{
    let (phi_b, phi_b_r) = op.lifting(rho_b);
    let mut phi = phi_b.clone();
    let mut phi_r = phi_b_r.clone();
    let mut previous = f64::INFINITY;
    let mut streak = 0;
    let mut update = f64::INFINITY;
    for iteration in 1..=max_iter {
        check_positive(op.grid(), rho_plus, &phi)?;
        let f = forcing(&phi, &phi_r)?;
        let (corr, corr_r) = op.apply(&f)?;
        let next: Vec<f64> = phi_b.iter().zip(&corr).map(|(a, b)| a + b).collect();
        update = phi.iter().zip(&next).fold(0.0, |m, (a, b)| m.max((a - b).abs()));
        if !update.is_finite() {
            return Err(Error::NonContraction { streak, update });
        }
        phi = next;
        phi_r = phi_b_r.iter().zip(&corr_r).map(|(a, b)| a + b).collect();
        if update <= tol {
            check_positive(op.grid(), rho_plus, &phi)?;
            return Ok(FixedPoint {
                phi,
                phi_r,
                iterations: iteration,
                update,
                converged: true,
            });
        }
        streak = if update > previous { streak + 1 } else { 0 };
        if streak >= GROWTH_STREAK {
            return Err(Error::NonContraction { streak, update });
        }
        previous = update;
    }
    Ok(FixedPoint {
        phi,
        phi_r,
        iterations: max_iter,
        update,
        converged: false,
    })
}

/// Flux form of the stationary equation,
/// `kappa phi_r - r^{1-n} (kappa rho_b + int_1^r s^{n-1} rhs(s) ds)`, at every node.
pub(crate) fn flux_residual(
    grid: &RadialGrid,
    kappa: f64,
    rho_b: f64,
    phi_r: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let measure = grid.measure();
    let weighted: Vec<f64> = rhs.iter().zip(&measure).map(|(a, m)| a * m).collect();
    let flux = cumulative(grid, &weighted)?;
    Ok(phi_r
        .iter()
        .zip(&flux)
        .zip(&measure)
        .map(|((pr, c), m)| kappa * pr - (kappa * rho_b + c) / m)
        .collect())
}

/// Residual of `kappa (phi_rr + (n-1)/r phi_r) = h(rho_+ + phi) - h(rho_+)` in flux form.
pub fn impermeable_residual(params: &ModelParams, field: &PerturbationField) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = field
        .phi
        .iter()
        .map(|&p| enthalpy_increment(params.gamma, params.rho_plus, p))
        .collect();
    flux_residual(&field.grid, params.kappa, params.rho_b, &field.phi_r, &rhs)
}

pub fn solve_impermeable(
    params: &ModelParams,
    grid: &RadialGrid,
    tol: f64,
    max_iter: usize,
) -> Result<(PerturbationField, SolverReport)> {
    let kp = kernel_params(params)?;
    if params.regime() != Regime::Impermeable {
        return Err(Error::InvalidParameter(format!(
            "impermeable solve requires u_minus = 0, got {}",
            params.u_minus
        )));
    }
    check_grid(params, grid)?;
    let op = GreenOperator::new(kp, grid);
    solve_with_operator(params, &op, tol, max_iter)
}

pub(crate) fn check_grid(params: &ModelParams, grid: &RadialGrid) -> Result<()> {
    if grid.dimension() != params.n {
        return Err(Error::InvalidParameter(format!(
            "grid built for n = {} but parameters have n = {}",
            grid.dimension(),
            params.n
        )));
    }
    Ok(())
}

pub(crate) fn solve_with_operator(
    params: &ModelParams,
    op: &GreenOperator,
    tol: f64,
    max_iter: usize,
) -> Result<(PerturbationField, SolverReport)> {
    let (gamma, rho_plus, kappa) = (params.gamma, params.rho_plus, params.kappa);
    let fp = fixed_point(op, params.rho_b, rho_plus, tol, max_iter, |phi, _| {
        phi.iter()
            .map(|&p| nonlinearity_impermeable(gamma, rho_plus, p).map(|v| v / kappa))
            .collect()
    })?;
    let mut field = PerturbationField::new(op.grid().clone(), params.rho_b, fp.phi, fp.phi_r)?;
    field.decay_rate_fit = decay_diagnostics(&field, op.kernel()).ok().map(|(s, _)| s);
    let residual = impermeable_residual(params, &field)?;
    let report = SolverReport {
        iterations: fp.iterations,
        final_update_sup: fp.update,
        ode_residual_sup: interior_sup(&residual),
        converged: fp.converged,
    };
    Ok((field, report))
}

/// Sup over nodes strictly inside `(1, R_max)`.
pub(crate) fn interior_sup(v: &[f64]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    sup_norm(&v[1..v.len() - 1])
}

/// Least-squares exponential rate of `|phi|` on `[1 + 2/alpha, R_max - 5/alpha]`,
/// ignoring samples below the noise floor, and the envelope constant
/// `max |phi| e^{sigma r} / |rho_b|` over the same samples.
pub fn decay_diagnostics(field: &PerturbationField, kp: &KernelParams) -> Result<(f64, f64)> {
    let lo = 1.0 + 2.0 / kp.alpha;
    let hi = field.grid.r_max() - 5.0 / kp.alpha;
    let samples: Vec<(f64, f64)> = field
        .grid
        .nodes()
        .iter()
        .zip(&field.phi)
        .filter(|(r, p)| **r >= lo && **r <= hi && p.abs() > DECAY_FLOOR)
        .map(|(r, p)| (*r, p.abs()))
        .collect();
    if samples.len() < 2 {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|(r, p)| (*r, p.ln())).collect();
    let (slope, _, _) = crate::stats::least_squares(&pts).ok_or(Error::EmptyWindow { lo, hi })?;
    let sigma = -slope;
    let scale = if field.rho_b != 0.0 { field.rho_b.abs() } else { 1.0 };
    let c = samples
        .iter()
        .map(|(r, p)| p * (sigma * r).exp() / scale)
        .fold(0.0, f64::max);
    Ok((sigma, c))
}

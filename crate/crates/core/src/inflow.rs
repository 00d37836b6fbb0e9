//! Inflow (`u_- > 0`) and outflow (`u_- < 0`) problems: fixed point of
//! `phi = phi_b + (1/kappa) int G(r,s) (S(s) + N(phi)(s)) s^{n-1} ds`
//! with the nonlocal viscous tail, and velocity from the mass flux.

use crate::error::{Error, Result};
use crate::green::kernel_params;
use crate::grid::{reverse_cumulative, RadialGrid};
use crate::impermeable::{
    check_grid, check_positive, fixed_point, flux_residual, interior_sup,
    nonlinearity_impermeable, SolverReport,
};
use crate::model::{enthalpy_increment, ModelParams, Regime};
use crate::operator::GreenOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub grid: RadialGrid,
    pub rho: Vec<f64>,
    pub rho_r: Vec<f64>,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    /// `rho(1) u_-`.
    pub mass_flux: f64,
    /// `rho(1)`, determined by the solution.
    pub rho_minus: f64,
    /// Flux-form residual of the integro-differential equation at every node.
    pub residual: Vec<f64>,
}

impl StationarySolution {
    /// `sup r^{2(n-1)} |phi|`.
    pub fn weighted_sup_phi(&self) -> f64 {
        let p = 2 * (self.grid.dimension() as i32 - 1);
        self.grid
            .nodes()
            .iter()
            .zip(&self.phi)
            .fold(0.0, |m, (r, v)| m.max(r.powi(p) * v.abs()))
    }

    /// `sup r^{2n-1} |phi_r|`.
    pub fn weighted_sup_phi_r(&self) -> f64 {
        let p = 2 * self.grid.dimension() as i32 - 1;
        self.grid
            .nodes()
            .iter()
            .zip(&self.rho_r)
            .fold(0.0, |m, (r, v)| m.max(r.powi(p) * v.abs()))
    }

    /// `max |r^{n-1} rho u - rho(1) u_-|`.
    pub fn mass_flux_defect(&self) -> f64 {
        let p = self.grid.dimension() as i32 - 1;
        self.grid
            .nodes()
            .iter()
            .zip(&self.rho)
            .zip(&self.u)
            .fold(0.0, |m, ((r, rho), u)| m.max((r.powi(p) * rho * u - self.mass_flux).abs()))
    }
}

/// `S(r) = u_-^2 / (2 r^{2(n-1)})`.
pub fn source_term(n: u32, u_minus: f64, r: f64) -> f64 {
    u_minus * u_minus / (2.0 * r.powi(2 * (n as i32 - 1)))
}

/// `int_r^{R_max} phi_r^2 / (s^{n-1} (phi + rho_+)^4) ds` at every node.
fn viscous_tail(grid: &RadialGrid, rho_plus: f64, phi: &[f64], phi_r: &[f64]) -> Result<Vec<f64>> {
    let measure = grid.measure();
    let g: Vec<f64> = phi
        .iter()
        .zip(phi_r)
        .zip(&measure)
        .map(|((p, pr), m)| pr * pr / (m * (p + rho_plus).powi(4)))
        .collect();
    reverse_cumulative(grid, &g)
}

/// The four nonlinear terms: viscous transport, pressure remainder, kinetic
/// ratio and the nonlocal viscous tail.
pub fn nonlinearity_inflow(
    params: &ModelParams,
    grid: &RadialGrid,
    phi: &[f64],
    phi_r: &[f64],
) -> Result<Vec<f64>> {
    grid.check_len(phi.len())?;
    grid.check_len(phi_r.len())?;
    let rho_plus = params.rho_plus;
    check_positive(grid, rho_plus, phi)?;
    let rho1 = phi[0] + rho_plus;
    let flux = params.mu * rho1 * params.u_minus;
    let tail = if flux != 0.0 {
        viscous_tail(grid, rho_plus, phi, phi_r)?
    } else {
        vec![0.0; phi.len()]
    };
    let p = params.n as i32 - 1;
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let rho = phi[i] + rho_plus;
            let viscous = flux * phi_r[i] / (r.powi(p) * rho.powi(3));
            let pressure = nonlinearity_impermeable(params.gamma, rho_plus, phi[i])?;
            let ratio = rho1 / rho;
            let kinetic = source_term(params.n, params.u_minus, r) * (ratio * ratio - 1.0);
            Ok(viscous + pressure + kinetic - flux * tail[i])
        })
        .collect()
}

/// Flux-form residual of
/// `kappa (rho_rr + (n-1)/r rho_r) = mu rho(1) u_- rho_r/(r^{n-1} rho^3) + h(rho) - h(rho_+)
///  + rho(1)^2 u_-^2/(2 r^{2(n-1)} rho^2) - mu rho(1) u_- int_r^inf rho_r^2/(s^{n-1} rho^4) ds`.
pub fn inflow_residual(
    params: &ModelParams,
    grid: &RadialGrid,
    phi: &[f64],
    phi_r: &[f64],
) -> Result<Vec<f64>> {
    let rho_plus = params.rho_plus;
    let rho1 = phi[0] + rho_plus;
    let flux = params.mu * rho1 * params.u_minus;
    let tail = viscous_tail(grid, rho_plus, phi, phi_r)?;
    let p = params.n as i32 - 1;
    let rhs: Vec<f64> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let rho = phi[i] + rho_plus;
            let rp = r.powi(p);
            flux * phi_r[i] / (rp * rho.powi(3))
                + enthalpy_increment(params.gamma, rho_plus, phi[i])
                + (rho1 * params.u_minus).powi(2) / (2.0 * rp * rp * rho * rho)
                - flux * tail[i]
        })
        .collect();
    flux_residual(grid, params.kappa, params.rho_b, phi_r, &rhs)
}

pub fn solve_inflow_outflow(
    params: &ModelParams,
    grid: &RadialGrid,
    tol: f64,
    max_iter: usize,
) -> Result<(StationarySolution, SolverReport)> {
    let kp = kernel_params(params)?;
    if params.regime() == Regime::Impermeable {
        return Err(Error::InvalidParameter(
            "inflow/outflow solve requires u_minus != 0".to_string(),
        ));
    }
    check_grid(params, grid)?;
    let op = GreenOperator::new(kp, grid);
    let source: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| source_term(params.n, params.u_minus, r))
        .collect();
    let kappa = params.kappa;
    let fp = fixed_point(&op, params.rho_b, params.rho_plus, tol, max_iter, |phi, phi_r| {
        let n = nonlinearity_inflow(params, grid, phi, phi_r)?;
        Ok(n.iter().zip(&source).map(|(a, s)| (a + s) / kappa).collect())
    })?;
    let residual = inflow_residual(params, grid, &fp.phi, &fp.phi_r)?;
    let rho: Vec<f64> = fp.phi.iter().map(|p| p + params.rho_plus).collect();
    let rho_minus = rho[0];
    let mass_flux = rho_minus * params.u_minus;
    let p = params.n as i32 - 1;
    let u = grid
        .nodes()
        .iter()
        .zip(&rho)
        .map(|(r, rho)| mass_flux / (rho * r.powi(p)))
        .collect();
    let report = SolverReport {
        iterations: fp.iterations,
        final_update_sup: fp.update,
        ode_residual_sup: interior_sup(&residual),
        converged: fp.converged,
    };
    Ok((
        StationarySolution {
            grid: grid.clone(),
            rho,
            rho_r: fp.phi_r,
            u,
            phi: fp.phi,
            mass_flux,
            rho_minus,
            residual,
        },
        report,
    ))
}

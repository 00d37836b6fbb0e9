//! Finite-difference Newton solver for the impermeable problem
//! `kappa (rho'' + (n-1)/r rho') = h(rho) - h(rho_+)` on `[1, R_max]` with
//! `rho'(1) = rho_b` and `rho(R_max) = rho_+`.
//!
//! Uses nothing from the kernel or fixed-point code paths; it exists to check them.

use crate::error::{Error, Result};
use crate::grid::{build_grid, Decay, GridOptions};
use crate::impermeable::solve_impermeable;
use crate::model::{enthalpy_derivative, enthalpy_increment, ModelParams, Regime};

const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub nodes: Vec<f64>,
    pub rho: Vec<f64>,
    pub newton_iterations: usize,
    /// Sup of the discrete residual, rows scaled by `h^2 / kappa`.
    pub residual: f64,
}

impl FdSolution {
    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Cubic Lagrange interpolation of `rho` at `r`.
    pub fn interpolate(&self, r: f64) -> f64 {
        interpolate_uniform(&self.nodes, &self.rho, r)
    }
}

fn interpolate_uniform(nodes: &[f64], values: &[f64], r: f64) -> f64 {
    let h = nodes[1] - nodes[0];
    let m = nodes.len();
    let k = (((r - nodes[0]) / h).floor().max(0.0) as usize).min(m - 2);
    let j0 = k.saturating_sub(1).min(m.saturating_sub(4));
    let width = m.min(4);
    let mut sum = 0.0;
    for a in j0..j0 + width {
        let mut l = 1.0;
        for b in j0..j0 + width {
            if a != b {
                l *= (r - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        sum += l * values[a];
    }
    sum
}

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i` in place of `d`.
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) -> Result<()> {
    let m = d.len();
    let mut cp = vec![0.0; m];
    let mut beta = b[0];
    if beta == 0.0 {
        return Err(singular());
    }
    d[0] /= beta;
    for i in 1..m {
        cp[i - 1] = c[i - 1] / beta;
        beta = b[i] - a[i] * cp[i - 1];
        if beta == 0.0 {
            return Err(singular());
        }
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for i in (0..m - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
    Ok(())
}

fn singular() -> Error {
    Error::NewtonDivergence {
        iterations: 0,
        residual: f64::NAN,
    }
}

struct System {
    n: f64,
    h: f64,
    kappa: f64,
    gamma: f64,
    rho_plus: f64,
    rho_b: f64,
    nodes: Vec<f64>,
}

impl System {
    /// Interior row `j` scaled by `h^2/kappa`: coefficients on `phi_{j-1}, phi_j, phi_{j+1}`.
    fn stencil(&self, j: usize) -> (f64, f64, f64) {
        let t = (self.n - 1.0) * self.h / (2.0 * self.nodes[j]);
        (1.0 - t, -2.0, 1.0 + t)
    }

    fn source(&self, phi: f64) -> (f64, f64) {
        let s = self.h * self.h / self.kappa;
        (
            s * enthalpy_increment(self.gamma, self.rho_plus, phi),
            s * enthalpy_derivative(self.gamma, self.rho_plus + phi),
        )
    }

    /// Residual and tridiagonal Jacobian over unknowns `phi_0 .. phi_{m-2}`.
    #[allow(clippy::type_complexity)]
    fn assemble(&self, phi: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = phi.len() - 1;
        let mut f = vec![0.0; m];
        let mut a = vec![0.0; m];
        let mut b = vec![0.0; m];
        let mut c = vec![0.0; m];
        for j in 1..m {
            let (lo, mid, hi) = self.stencil(j);
            let (s, ds) = self.source(phi[j]);
            f[j] = lo * phi[j - 1] + mid * phi[j] + hi * phi[j + 1] - s;
            a[j] = lo;
            b[j] = mid - ds;
            c[j] = hi;
        }
        // (-3 phi_0 + 4 phi_1 - phi_2)/2 - h rho_b, with phi_2 eliminated via row 1.
        let (lo1, _, hi1) = self.stencil(1);
        let w = 1.0 / (2.0 * hi1);
        let boundary = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / 2.0 - self.h * self.rho_b;
        f[0] = boundary + w * f[1];
        b[0] = -1.5 + w * lo1;
        c[0] = 2.0 + w * b[1];
        if m == 1 {
            c[0] = 0.0;
        }
        (f, a, b, c)
    }
}

/// Newton iteration on the central-difference system with `node_count` uniform nodes.
pub fn solve_fd(params: &ModelParams, node_count: usize, r_max: f64, newton_tol: f64) -> Result<FdSolution> {
    params.validate()?;
    if params.regime() != Regime::Impermeable {
        return Err(Error::InvalidParameter(format!(
            "finite-difference oracle requires u_minus = 0, got {}",
            params.u_minus
        )));
    }
    if node_count < 100 {
        return Err(Error::InvalidParameter(format!(
            "node_count must be at least 100, got {node_count}"
        )));
    }
    if !(r_max > 1.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("R_max must exceed 1, got {r_max}")));
    }
    let h = (r_max - 1.0) / (node_count - 1) as f64;
    let nodes: Vec<f64> = (0..node_count).map(|j| 1.0 + j as f64 * h).collect();
    let sys = System {
        n: params.n as f64,
        h,
        kappa: params.kappa,
        gamma: params.gamma,
        rho_plus: params.rho_plus,
        rho_b: params.rho_b,
        nodes,
    };
    // decaying exponential with the prescribed wall slope
    let alpha = (enthalpy_derivative(params.gamma, params.rho_plus) / params.kappa).sqrt();
    let mut phi: Vec<f64> = sys
        .nodes
        .iter()
        .map(|&r| -params.rho_b / alpha * (-alpha * (r - 1.0)).exp())
        .collect();
    *phi.last_mut().unwrap() = 0.0;

    let mut iterations = 0;
    loop {
        for (r, p) in sys.nodes.iter().zip(&phi) {
            if !(params.rho_plus + p > 0.0) {
                return Err(Error::Positivity {
                    r: *r,
                    rho: params.rho_plus + p,
                });
            }
        }
        let (mut f, a, b, c) = sys.assemble(&phi);
        let residual = f.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if !residual.is_finite() {
            return Err(Error::NewtonDivergence { iterations, residual });
        }
        if residual <= newton_tol {
            let rho = phi.iter().map(|p| params.rho_plus + p).collect();
            return Ok(FdSolution {
                nodes: sys.nodes,
                rho,
                newton_iterations: iterations,
                residual,
            });
        }
        if iterations >= MAX_NEWTON {
            return Err(Error::NewtonDivergence { iterations, residual });
        }
        thomas(&a, &b, &c, &mut f).map_err(|_| Error::NewtonDivergence { iterations, residual })?;
        for (p, d) in phi.iter_mut().zip(&f) {
            *p -= d;
        }
        iterations += 1;
    }
}

/// Richardson combination `(4 u_{h/2} - u_h)/3` on the coarse nodes.
pub fn solve_fd_extrapolated(
    params: &ModelParams,
    node_count: usize,
    r_max: f64,
    newton_tol: f64,
) -> Result<FdSolution> {
    let coarse = solve_fd(params, node_count, r_max, newton_tol)?;
    let fine = solve_fd(params, 2 * node_count - 1, r_max, newton_tol)?;
    let rho = coarse
        .rho
        .iter()
        .enumerate()
        .map(|(j, c)| (4.0 * fine.rho[2 * j] - c) / 3.0)
        .collect();
    Ok(FdSolution {
        rho,
        newton_iterations: coarse.newton_iterations.max(fine.newton_iterations),
        residual: coarse.residual.max(fine.residual),
        ..coarse
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossValidation {
    pub sup_diff: f64,
    pub pass: bool,
    pub fd_nodes: usize,
    pub green_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossValidateOptions {
    pub grid: GridOptions,
    /// Finite-difference nodes per unit `1/alpha` on the coarse level.
    pub fd_points_per_unit_alpha: f64,
    pub solver_tol: f64,
    pub max_iter: usize,
    pub newton_tol: f64,
    pub max_fd_nodes: usize,
}

impl Default for CrossValidateOptions {
    fn default() -> Self {
        Self {
            grid: GridOptions::default(),
            fd_points_per_unit_alpha: 200.0,
            solver_tol: 1e-12,
            max_iter: 500,
            newton_tol: 1e-13,
            max_fd_nodes: 2_000_000,
        }
    }
}

pub fn cross_validate(params: &ModelParams, tol: f64) -> Result<CrossValidation> {
    cross_validate_with(params, tol, &CrossValidateOptions::default())
}

/// Solves with both methods on the same `[1, R_max]` and compares at the
/// Green-solver nodes.
pub fn cross_validate_with(
    params: &ModelParams,
    tol: f64,
    options: &CrossValidateOptions,
) -> Result<CrossValidation> {
    params.validate()?;
    let alpha = params.alpha();
    let grid = build_grid(params.n, alpha, &options.grid, Decay::Exponential)?;
    let (field, _) = solve_impermeable(params, &grid, options.solver_tol, options.max_iter)?;
    let r_max = grid.r_max();
    let want = (options.fd_points_per_unit_alpha * alpha * (r_max - 1.0)).ceil() as usize + 1;
    let fd_nodes = want.max(101);
    if 2 * fd_nodes > options.max_fd_nodes {
        return Err(Error::GridTooLarge {
            nodes: 2 * fd_nodes,
            cap: options.max_fd_nodes,
        });
    }
    let fd = solve_fd_extrapolated(params, fd_nodes, r_max, options.newton_tol)?;
    let fd_phi: Vec<f64> = fd.rho.iter().map(|v| v - params.rho_plus).collect();
    let sup_diff = grid
        .nodes()
        .iter()
        .zip(&field.phi)
        .map(|(&r, p)| (p - interpolate_uniform(&fd.nodes, &fd_phi, r)).abs())
        .fold(0.0, f64::max);
    Ok(CrossValidation {
        sup_diff,
        pass: sup_diff <= tol,
        fd_nodes,
        green_nodes: grid.len(),
    })
}

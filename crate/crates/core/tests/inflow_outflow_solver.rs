use nsk_core::grid::{build_grid, sup_norm, Decay, GridOptions, RadialGrid};
use nsk_core::impermeable::solve_impermeable;
use nsk_core::inflow::{nonlinearity_inflow, solve_inflow_outflow, source_term, StationarySolution};
use nsk_core::model::ModelParams;

fn params(n: u32, mu: f64, u_minus: f64, rho_b: f64) -> ModelParams {
    ModelParams {
        n,
        gamma: 1.0,
        kappa: 1.0,
        mu,
        rho_plus: 1.0,
        rho_b,
        u_minus,
    }
}

fn grid_for(p: &ModelParams, ppu: f64) -> RadialGrid {
    let opts = GridOptions {
        points_per_unit_alpha: ppu,
        ..GridOptions::default()
    };
    build_grid(p.n, p.alpha(), &opts, Decay::Algebraic).unwrap()
}

fn solve(p: &ModelParams, ppu: f64, tol: f64) -> StationarySolution {
    let (s, report) = solve_inflow_outflow(p, &grid_for(p, ppu), tol, 200).unwrap();
    assert!(report.converged);
    s
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, eps, 50)
}

#[test]
fn nonlinearity_vanishes_at_rest() {
    for (mu, u) in [(1.0, 0.3), (0.0, -0.2), (2.0, 0.0)] {
        let p = params(3, mu, u, -0.1);
        let grid = grid_for(&p, 10.0);
        let zero = vec![0.0; grid.len()];
        let n = nonlinearity_inflow(&p, &grid, &zero, &zero).unwrap();
        assert!(n.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn nonlinearity_matches_term_by_term_oracle() {
    let p = params(3, 1.0, 0.1, -0.1);
    let grid = grid_for(&p, 40.0);
    let phi_f = |r: f64| 0.01 * (-r).exp();
    let phi_r_f = |r: f64| -0.01 * (-r).exp();
    let phi: Vec<f64> = grid.nodes().iter().map(|&r| phi_f(r)).collect();
    let phi_r: Vec<f64> = grid.nodes().iter().map(|&r| phi_r_f(r)).collect();
    let got = nonlinearity_inflow(&p, &grid, &phi, &phi_r).unwrap();
    let rho1 = 1.0 + phi_f(1.0);
    let r_max = grid.r_max();
    for (i, &r) in grid.nodes().iter().enumerate().step_by(7) {
        let rho = 1.0 + phi_f(r);
        let viscous = rho1 * 0.1 * phi_r_f(r) / (r * r * rho.powi(3));
        let pressure = rho.ln() - phi_f(r);
        let kinetic = 0.01 / (2.0 * r.powi(4)) * ((rho1 / rho).powi(2) - 1.0);
        let integrand = |s: f64| phi_r_f(s).powi(2) / (s * s * (1.0 + phi_f(s)).powi(4));
        let tail = adaptive_simpson(&integrand, r, r_max, 1e-16);
        let expected = viscous + pressure + kinetic - rho1 * 0.1 * tail;
        assert!((got[i] - expected).abs() <= 1e-11, "r={r}: {} vs {expected}", got[i]);
    }
}

#[test]
fn mass_flux_and_residual() {
    let tol = 1e-10;
    for p in [params(3, 1.0, 0.1, -0.1), params(3, 1.0, -0.05, 0.0), params(2, 1.0, 0.1, -0.05)] {
        let (s, report) = solve_inflow_outflow(&p, &grid_for(&p, 20.0), tol, 200).unwrap();
        assert!(report.converged);
        assert!(s.mass_flux_defect() <= 1e-12 * s.mass_flux.abs());
        assert!(report.ode_residual_sup <= 10.0 * tol, "{:e}", report.ode_residual_sup);
        assert!((s.rho_r[0] - p.rho_b).abs() <= 10.0 * tol);
        assert!(s.rho.iter().all(|&v| v > 0.0));
        assert_eq!(s.rho_minus, s.rho[0]);
    }
}

#[test]
fn algebraic_envelope() {
    let p = params(3, 1.0, 0.05, 0.0);
    let s = solve(&p, 10.0, 1e-10);
    let data = p.rho_b.abs() + p.u_minus * p.u_minus;
    assert!(s.weighted_sup_phi() <= 10.0 * data, "{}", s.weighted_sup_phi());
    assert!(s.weighted_sup_phi_r().is_finite());
}

#[test]
fn weighted_norms_scale_with_data() {
    let mut ratios = Vec::new();
    for t in [1.0, 0.5, 0.25, 0.125] {
        let p = params(3, 1.0, 0.1 * f64::sqrt(t), -0.1 * t);
        let s = solve(&p, 10.0, 1e-12);
        let data = p.rho_b.abs() + p.u_minus * p.u_minus;
        ratios.push(s.weighted_sup_phi() / data);
        ratios.push(s.weighted_sup_phi_r() / data);
    }
    for pair in [(0, 2), (0, 4), (0, 6), (1, 3), (1, 5), (1, 7)] {
        let q = ratios[pair.0] / ratios[pair.1];
        assert!((0.5..=2.0).contains(&q), "{ratios:?}");
    }
}

#[test]
fn outflow_velocity_envelope() {
    let p = params(3, 1.0, -0.05, 0.0);
    let s = solve(&p, 10.0, 1e-10);
    let lo = s.rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = s.rho.iter().cloned().fold(0.0, f64::max);
    let c = (hi / s.rho_minus).max(s.rho_minus / lo);
    for (r, u) in s.grid.nodes().iter().zip(&s.u) {
        let scaled = u * r * r;
        assert!(scaled < 0.0);
        assert!(scaled.abs() >= 0.05 / c * (1.0 - 1e-12) && scaled.abs() <= 0.05 * c * (1.0 + 1e-12));
    }
    assert!(c < 1.01);
}

#[test]
fn euler_korteweg_limit() {
    let p0 = params(3, 0.0, 0.1, -0.1);
    let p1 = params(3, 1e-6, 0.1, -0.1);
    let a = solve(&p0, 10.0, 1e-12);
    let b = solve(&p1, 10.0, 1e-12);
    let diff = a.phi.iter().zip(&b.phi).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
    assert!(diff <= 1e-4 * sup_norm(&a.phi), "{diff:e}");
}

#[test]
fn small_velocity_recovers_impermeable_solution() {
    let base = params(3, 1.0, 0.0, -0.1);
    let grid = grid_for(&base, 10.0);
    let (imp, _) = solve_impermeable(&base, &grid, 1e-13, 200).unwrap();
    let mut scaled = Vec::new();
    for u in [1e-2, 1e-3, 1e-4] {
        let p = ModelParams { u_minus: u, ..base };
        let (s, _) = solve_inflow_outflow(&p, &grid, 1e-13, 200).unwrap();
        let diff = s.phi.iter().zip(&imp.phi).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
        scaled.push(diff / u);
    }
    let c = scaled[0];
    assert!(scaled.iter().all(|&v| v <= 2.0 * c && v.is_finite()), "{scaled:?}");
}

#[test]
fn rejects_impermeable_data() {
    let p = params(3, 1.0, 0.0, -0.1);
    assert!(solve_inflow_outflow(&p, &grid_for(&p, 10.0), 1e-10, 200).is_err());
    assert_eq!(source_term(3, 0.0, 1.0), 0.0);
}

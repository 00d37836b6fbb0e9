//! Vanishing-capillarity limit `rho_yy = h(rho) - h(rho_+)` on `y > 0` with
//! `rho_y(0) = rho_b0` and `rho -> rho_+`, integrated along its stable manifold
//! `rho_y = -sgn(rho - rho_+) sqrt(2 W(rho))`.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::model::{enthalpy_derivative, enthalpy_increment};

/// Deviation from `rho_+` below which the linearized tail takes over.
pub const TAIL_SWITCH: f64 = 1e-8;
/// Deviation at which tail sampling stops.
pub const TAIL_FLOOR: f64 = 1e-14;
/// Largest integration step, which keeps Hermite interpolation accurate.
const MAX_STEP: f64 = 0.02;
const MIN_STEP: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-13;

fn check_density(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "density",
            value: x,
        })
    }
}

/// `W(x) = int_{rho_+}^x (h(y) - h(rho_+)) dy`.
pub fn potential_w(gamma: f64, rho_plus: f64, x: f64) -> Result<f64> {
    check_density(x)?;
    Ok(potential_unchecked(gamma, rho_plus, x))
}

fn potential_unchecked(gamma: f64, rho_plus: f64, x: f64) -> f64 {
    let d = (x - rho_plus) / rho_plus;
    let scale = rho_plus.powf(gamma);
    if d.abs() < 0.1 {
        // rho_+^gamma sum_{k>=2} c_k d^k, c_k = gamma prod_{j=2}^{k-1} (gamma - j) / k!
        let mut c = gamma / 2.0;
        let mut dk = d * d;
        let mut sum = c * dk;
        for k in 3..60 {
            c *= (gamma - (k - 1) as f64) / k as f64;
            dk *= d;
            let term = c * dk;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return scale * sum;
    }
    if gamma == 1.0 {
        x * (x / rho_plus).ln() - (x - rho_plus)
    } else {
        scale / (gamma - 1.0) * ((1.0 + d).powf(gamma) - 1.0 - gamma * d)
    }
}

/// Right-hand side of the reduced first-order equation.
fn slope(gamma: f64, rho_plus: f64, x: f64) -> f64 {
    let w = potential_unchecked(gamma, rho_plus, x).max(0.0);
    let s = (2.0 * w).sqrt();
    if x > rho_plus {
        -s
    } else if x < rho_plus {
        s
    } else {
        0.0
    }
}

/// `rho(0)` on the stable manifold through slope `rho_b0`; above `rho_+` iff `rho_b0 < 0`.
pub fn solve_rho_minus(gamma: f64, rho_plus: f64, rho_b0: f64) -> Result<f64> {
    if !(rho_plus > 0.0) || !(gamma >= 1.0) || !rho_b0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need rho_plus > 0, gamma >= 1, finite rho_b0; got {rho_plus}, {gamma}, {rho_b0}"
        )));
    }
    if rho_b0 == 0.0 {
        return Ok(rho_plus);
    }
    let target = rho_b0.abs();
    let reach = |x: f64| (2.0 * potential_unchecked(gamma, rho_plus, x)).sqrt() - target;
    let (mut lo, mut hi) = if rho_b0 < 0.0 {
        let mut hi = 2.0 * rho_plus;
        let mut doublings = 0;
        while reach(hi) < 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 || !hi.is_finite() {
                return Err(Error::NoRoot {
                    slope: rho_b0,
                    reason: "bracket expansion failed".to_string(),
                });
            }
        }
        (rho_plus, hi)
    } else {
        // the largest attainable slope below rho_+ is sqrt(2 W(0+)) = sqrt(2 rho_+^gamma)
        let limit = (2.0 * rho_plus.powf(gamma)).sqrt();
        if target >= limit {
            return Err(Error::NoRoot {
                slope: rho_b0,
                reason: format!("slope exceeds the vacuum limit {limit}"),
            });
        }
        (0.0, rho_plus)
    };
    // reach is increasing in |x - rho_+| on either side
    let increasing = rho_b0 < 0.0;
    for _ in 0..400 {
        if hi - lo <= ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let above = reach(mid) > 0.0;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitProfile {
    pub gamma: f64,
    pub rho_plus: f64,
    pub rho_b0: f64,
    pub y_nodes: Vec<f64>,
    pub rho_bar: Vec<f64>,
    pub rho_bar_y: Vec<f64>,
    pub rho_minus_limit: f64,
    /// `sqrt(h'(rho_+))`, the decay rate of the linearized tail.
    pub saddle_rate: f64,
    /// Index of the last node integrated before the tail switch.
    switch_index: usize,
}

// Dormand-Prince 5(4) tableau; the equation is autonomous so the nodes are unused
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the reduced equation from `rho(0) = rho_-` with an adaptive
/// Dormand-Prince pair, then continues with the linearized tail once
/// `|rho - rho_+| < 1e-8`.
pub fn integrate_profile(
    gamma: f64,
    rho_plus: f64,
    rho_b0: f64,
    y_max: f64,
    step_control: f64,
) -> Result<LimitProfile> {
    if !(y_max > 0.0) || !(step_control > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need y_max > 0 and step_control > 0, got {y_max}, {step_control}"
        )));
    }
    let rho_minus = solve_rho_minus(gamma, rho_plus, rho_b0)?;
    let rate = enthalpy_derivative(gamma, rho_plus).sqrt();
    let f = |x: f64| slope(gamma, rho_plus, x);
    let mut ys = vec![0.0];
    let mut xs = vec![rho_minus];
    let mut y = 0.0;
    let mut x = rho_minus;
    if rho_b0 == 0.0 {
        return Ok(LimitProfile {
            gamma,
            rho_plus,
            rho_b0,
            y_nodes: vec![0.0, y_max],
            rho_bar: vec![rho_plus, rho_plus],
            rho_bar_y: vec![0.0, 0.0],
            rho_minus_limit: rho_plus,
            saddle_rate: rate,
            switch_index: 1,
        });
    }
    let mut h = MAX_STEP.min(0.1 / rate);
    let mut k = [0.0; 7];
    while y < y_max && (x - rho_plus).abs() >= TAIL_SWITCH {
        h = h.min(y_max - y);
        k[0] = f(x);
        let mut admissible = true;
        for s in 1..7 {
            let xi = x + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            if !(xi > 0.0) {
                admissible = false;
                break;
            }
            k[s] = f(xi);
        }
        let x5 = x + h * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
        let x4 = x + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
        let err = if admissible { (x5 - x4).abs() / step_control } else { f64::INFINITY };
        // reject steps that cross the equilibrium or leave the tolerance
        let crossed = (x5 - rho_plus) * (x - rho_plus) <= 0.0;
        if err <= 1.0 && !crossed && x5 > 0.0 {
            y += h;
            x = x5;
            ys.push(y);
            xs.push(x);
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * grow).min(MAX_STEP);
        } else {
            let shrink = if crossed || !err.is_finite() { 0.25 } else { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) };
            h *= shrink;
            if h < MIN_STEP {
                return Err(Error::StepCollapse { step: h, y });
            }
        }
    }
    // linearized tail rho_+ + d e^{-rate (y - y_L)}
    let (y_l, d_l) = (y, x - rho_plus);
    let mut t = y;
    while t < y_max && (rho_plus + d_l * (-rate * (t - y_l)).exp() - rho_plus).abs() >= TAIL_FLOOR {
        t = (t + MAX_STEP).min(y_max);
        ys.push(t);
        xs.push(rho_plus + d_l * (-rate * (t - y_l)).exp());
    }
    let switch_index = ys.iter().position(|&v| v >= y_l).unwrap_or(0);
    let rho_bar_y = xs
        .iter()
        .enumerate()
        .map(|(i, &v)| if i > switch_index { -rate * (v - rho_plus) } else { f(v) })
        .collect();
    Ok(LimitProfile {
        gamma,
        rho_plus,
        rho_b0,
        y_nodes: ys,
        rho_bar: xs,
        rho_bar_y,
        rho_minus_limit: rho_minus,
        saddle_rate: rate,
        switch_index,
    })
}

impl LimitProfile {
    /// `rho_bar_yy` at node `i`, from the equation itself (linearized in the tail).
    fn curvature(&self, i: usize) -> f64 {
        let d = self.rho_bar[i] - self.rho_plus;
        if i > self.switch_index {
            self.saddle_rate * self.saddle_rate * d
        } else {
            enthalpy_increment(self.gamma, self.rho_plus, d)
        }
    }

    /// `(rho_bar(y), rho_bar_y(y))` by quintic Hermite interpolation of the
    /// stored values, slopes and curvatures, extended past the last node by
    /// the exponential tail.
    pub fn evaluate(&self, y: f64) -> (f64, f64) {
        let last = self.y_nodes.len() - 1;
        if y >= self.y_nodes[last] {
            let d = (self.rho_bar[last] - self.rho_plus) * (-self.saddle_rate * (y - self.y_nodes[last])).exp();
            return (self.rho_plus + d, -self.saddle_rate * d);
        }
        let y = y.max(0.0);
        let i = self.y_nodes.partition_point(|&v| v <= y).saturating_sub(1).min(last - 1);
        let h = self.y_nodes[i + 1] - self.y_nodes[i];
        let t = (y - self.y_nodes[i]) / h;
        let (p0, p1) = (self.rho_bar[i], self.rho_bar[i + 1]);
        let (m0, m1) = (self.rho_bar_y[i] * h, self.rho_bar_y[i + 1] * h);
        let (a0, a1) = (self.curvature(i) * h * h, self.curvature(i + 1) * h * h);
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let value = (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5) * p0
            + (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5) * m0
            + 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5) * a0
            + 0.5 * (t3 - 2.0 * t4 + t5) * a1
            + (-4.0 * t3 + 7.0 * t4 - 3.0 * t5) * m1
            + (10.0 * t3 - 15.0 * t4 + 6.0 * t5) * p1;
        let deriv = ((-30.0 * t2 + 60.0 * t3 - 30.0 * t4) * (p0 - p1)
            + (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4) * m0
            + 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4) * a0
            + 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4) * a1
            + (-12.0 * t2 + 28.0 * t3 - 15.0 * t4) * m1)
            / h;
        (value, deriv)
    }
}

/// `rho_bar((r - 1)/sqrt(kappa))` at the grid nodes.
pub fn rescale_to_r(profile: &LimitProfile, kappa: f64, grid: &RadialGrid) -> Vec<f64> {
    let s = kappa.sqrt();
    grid.nodes().iter().map(|&r| profile.evaluate((r - 1.0) / s).0).collect()
}

/// `d/dr rho_bar((r - 1)/sqrt(kappa)) = rho_bar_y / sqrt(kappa)` at the grid nodes.
pub fn rescale_derivative_to_r(profile: &LimitProfile, kappa: f64, grid: &RadialGrid) -> Vec<f64> {
    let s = kappa.sqrt();
    grid.nodes().iter().map(|&r| profile.evaluate((r - 1.0) / s).1 / s).collect()
}

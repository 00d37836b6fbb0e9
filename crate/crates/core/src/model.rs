//! Problem parameters and the polytropic enthalpy `h(rho)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and boundary data of the stationary problem on `r > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Space dimension.
    pub n: u32,
    /// Adiabatic exponent of `P(rho) = rho^gamma`.
    pub gamma: f64,
    /// Capillarity coefficient.
    pub kappa: f64,
    /// Effective viscosity `2 nu + lambda`.
    pub mu: f64,
    /// Far-field density.
    pub rho_plus: f64,
    /// Prescribed `rho_r(1)`.
    pub rho_b: f64,
    /// Prescribed `u(1)`.
    pub u_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Impermeable,
    Inflow,
    Outflow,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Impermeable => "impermeable",
            Regime::Inflow => "inflow",
            Regime::Outflow => "outflow",
        })
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be >= 1, got {}", self.gamma));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return fail(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return fail(format!("mu must be nonnegative, got {}", self.mu));
        }
        if !(self.rho_plus > 0.0 && self.rho_plus.is_finite()) {
            return fail(format!("rho_plus must be positive, got {}", self.rho_plus));
        }
        if !self.rho_b.is_finite() {
            return fail(format!("rho_b must be finite, got {}", self.rho_b));
        }
        if !self.u_minus.is_finite() {
            return fail(format!("u_minus must be finite, got {}", self.u_minus));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        if self.u_minus == 0.0 {
            Regime::Impermeable
        } else if self.u_minus > 0.0 {
            Regime::Inflow
        } else {
            Regime::Outflow
        }
    }

    /// `sqrt(h'(rho_plus) / kappa)`, the decay rate of the linearized operator.
    pub fn alpha(&self) -> f64 {
        (enthalpy_derivative(self.gamma, self.rho_plus) / self.kappa).sqrt()
    }
}

/// `h(rho) = gamma/(gamma-1) rho^{gamma-1}` for `gamma > 1`, `ln rho` for `gamma = 1`.
pub fn enthalpy_h(gamma: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            what: "density",
            value: rho,
        });
    }
    Ok(enthalpy_unchecked(gamma, rho))
}

#[inline]
pub(crate) fn enthalpy_unchecked(gamma: f64, rho: f64) -> f64 {
    if gamma == 1.0 {
        rho.ln()
    } else {
        gamma / (gamma - 1.0) * rho.powf(gamma - 1.0)
    }
}

/// `h'(rho) = P'(rho) / rho = gamma rho^{gamma-2}`.
#[inline]
pub fn enthalpy_derivative(gamma: f64, rho: f64) -> f64 {
    gamma * rho.powf(gamma - 2.0)
}

/// `h(rho_plus + phi) - h(rho_plus)`, accurate for small `phi`.
pub(crate) fn enthalpy_increment(gamma: f64, rho_plus: f64, phi: f64) -> f64 {
    let d = phi / rho_plus;
    if gamma == 1.0 {
        d.ln_1p()
    } else {
        // gamma/(gamma-1) rho_+^{gamma-1} ((1+d)^{gamma-1} - 1)
        gamma / (gamma - 1.0) * rho_plus.powf(gamma - 1.0) * ((gamma - 1.0) * d.ln_1p()).exp_m1()
    }
}

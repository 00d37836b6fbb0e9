//! Green function of the radial modified Helmholtz operator
//! `phi'' + (n-1)/r phi' - alpha^2 phi` on `[1, inf)` with homogeneous Neumann
//! data at `r = 1` and decay at infinity, together with the lifting function
//! that carries the Neumann datum `rho_b`.
//!
//! With `Ihat = e^{-x} I`, `Khat = e^{x} K` and
//! `beta = Ihat_{nu+1}(alpha) / Khat_{nu+1}(alpha)` the kernel reads
//!
//! ```text
//! G(r,s) = -(rs)^{-nu} [ e^{-alpha|r-s|} Ihat_nu(alpha min) Khat_nu(alpha max)
//!                      + beta e^{-alpha(r+s-2)} Khat_nu(alpha r) Khat_nu(alpha s) ]
//! ```
//!
//! Both exponents are non-positive, so nothing overflows however large
//! `alpha r` gets.

use crate::bessel::{bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, BesselOrder};
use crate::error::{Error, Result};
use crate::model::{enthalpy_derivative, ModelParams};

/// A real number stored as `mantissa * e^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpScaled {
    pub mantissa: f64,
    pub exponent: f64,
}

impl ExpScaled {
    pub fn new(mantissa: f64, exponent: f64) -> Self {
        Self { mantissa, exponent }
    }

    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.exponent.exp()
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.mantissa * factor, self.exponent)
    }
}

impl std::ops::Add for ExpScaled {
    type Output = ExpScaled;

    fn add(self, rhs: ExpScaled) -> ExpScaled {
        if self.mantissa == 0.0 {
            return rhs;
        }
        if rhs.mantissa == 0.0 {
            return self;
        }
        let e = self.exponent.max(rhs.exponent);
        ExpScaled::new(
            self.mantissa * (self.exponent - e).exp() + rhs.mantissa * (rhs.exponent - e).exp(),
            e,
        )
    }
}

/// Order and decay rate of the linearized operator, with the boundary
/// constants that every kernel evaluation needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub nu: BesselOrder,
    pub alpha: f64,
    /// `Ihat_{nu+1}(alpha)`
    i_next_at_one: f64,
    /// `Khat_{nu+1}(alpha)`
    k_next_at_one: f64,
}

impl KernelParams {
    pub fn new(nu: BesselOrder, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            nu,
            alpha,
            i_next_at_one: bessel_i_scaled(nu.next(), alpha)?,
            k_next_at_one: bessel_k_scaled(nu.next(), alpha)?,
        })
    }

    /// Space dimension `n = 2 nu + 2`.
    pub fn dimension(&self) -> u32 {
        self.nu.two_nu() + 2
    }

    /// `I_{nu+1}(alpha) / K_{nu+1}(alpha)` with the `e^{2 alpha}` factor removed.
    pub fn reflection(&self) -> f64 {
        self.i_next_at_one / self.k_next_at_one
    }

    pub(crate) fn factors(&self, r: f64) -> RadialFactors {
        let z = self.alpha * r;
        let nu = self.nu;
        // z > 0 always holds here; the scaled evaluators cannot fail.
        RadialFactors {
            r_pow: r.powf(-nu.nu()),
            i_nu: bessel_i_scaled(nu, z).expect("positive argument"),
            k_nu: bessel_k_scaled(nu, z).expect("positive argument"),
            i_next: bessel_i_scaled(nu.next(), z).expect("positive argument"),
            k_next: bessel_k_scaled(nu.next(), z).expect("positive argument"),
        }
    }
}

/// Scaled Bessel values at `alpha r` plus `r^{-nu}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialFactors {
    pub r_pow: f64,
    pub i_nu: f64,
    pub k_nu: f64,
    pub i_next: f64,
    pub k_next: f64,
}

/// `alpha = sqrt(h'(rho_plus) / kappa)`, `nu = (n - 2) / 2`.
pub fn kernel_params(params: &ModelParams) -> Result<KernelParams> {
    params.validate()?;
    let alpha = (enthalpy_derivative(params.gamma, params.rho_plus) / params.kappa).sqrt();
    KernelParams::new(BesselOrder::from_dimension(params.n)?, alpha)
}

fn check_radius(name: &str, r: f64) -> Result<()> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be >= 1, got {r}")))
    }
}

/// Lifting function `phi_b(r) = -rho_b / (alpha K_{nu+1}(alpha)) r^{-nu} K_nu(alpha r)`
/// and its derivative. `phi_b'(1) = rho_b`.
pub fn lifting_phi_b(kp: &KernelParams, rho_b: f64, r: f64) -> Result<(f64, f64)> {
    check_radius("r", r)?;
    if rho_b == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok(lifting_from_factors(kp, rho_b, r, &kp.factors(r)))
}

pub(crate) fn lifting_from_factors(
    kp: &KernelParams,
    rho_b: f64,
    r: f64,
    f: &RadialFactors,
) -> (f64, f64) {
    let decay = (-kp.alpha * (r - 1.0)).exp();
    let common = rho_b * f.r_pow * decay / kp.k_next_at_one;
    (-common * f.k_nu / kp.alpha, common * f.k_next)
}

/// `G(r, s)` in mantissa/exponent form.
pub fn green_scaled(kp: &KernelParams, r: f64, s: f64) -> Result<ExpScaled> {
    check_radius("r", r)?;
    check_radius("s", s)?;
    let (fr, fs) = (kp.factors(r), kp.factors(s));
    let (near, far) = if s <= r { (fs, fr) } else { (fr, fs) };
    let a = kp.alpha;
    let direct = ExpScaled::new(near.i_nu * far.k_nu, -a * (r - s).abs());
    let reflected = ExpScaled::new(kp.reflection() * fr.k_nu * fs.k_nu, -a * (r + s - 2.0));
    Ok((direct + reflected).scale(-fr.r_pow * fs.r_pow))
}

/// `G(r, s)`. Symmetric in its arguments and strictly negative.
pub fn green(kp: &KernelParams, r: f64, s: f64) -> Result<f64> {
    Ok(green_scaled(kp, r, s)?.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `r -> s^-`, the branch `r <= s`.
    Left,
    /// `r -> s^+`, the branch `s <= r`.
    Right,
}

fn green_dr_branch(kp: &KernelParams, r: f64, s: f64, side: Side) -> Result<f64> {
    check_radius("r", r)?;
    check_radius("s", s)?;
    let (fr, fs) = (kp.factors(r), kp.factors(s));
    let a = kp.alpha;
    let direct = match side {
        Side::Right => ExpScaled::new(fs.i_nu * fr.k_next, -a * (r - s).abs()),
        Side::Left => ExpScaled::new(-fr.i_next * fs.k_nu, -a * (r - s).abs()),
    };
    let reflected = ExpScaled::new(kp.reflection() * fr.k_next * fs.k_nu, -a * (r + s - 2.0));
    Ok((direct + reflected).scale(a * fr.r_pow * fs.r_pow).value())
}

/// `d/dr G(r, s)` for `r != s`.
pub fn green_dr(kp: &KernelParams, r: f64, s: f64) -> Result<f64> {
    if r == s {
        return Err(Error::DiagonalDerivative(r));
    }
    let side = if r > s { Side::Right } else { Side::Left };
    green_dr_branch(kp, r, s, side)
}

/// `d/dr G` approached from `r < s` (evaluates the `r <= s` branch).
pub fn green_dr_left(kp: &KernelParams, r: f64, s: f64) -> Result<f64> {
    green_dr_branch(kp, r, s, Side::Left)
}

/// `d/dr G` approached from `r > s` (evaluates the `s <= r` branch).
///
/// On the diagonal `green_dr_right - green_dr_left = r^{1-n}`.
pub fn green_dr_right(kp: &KernelParams, r: f64, s: f64) -> Result<f64> {
    green_dr_branch(kp, r, s, Side::Right)
}

/// Wronskian `phi_+ phi_-' - phi_+' phi_-` of the Neumann-regular and the
/// decaying solution, evaluated from unscaled Bessel functions. Limited to
/// `alpha r` within the unscaled range.
pub fn wronskian(kp: &KernelParams, r: f64) -> Result<f64> {
    check_radius("r", r)?;
    let (a, nu) = (kp.alpha, kp.nu);
    let z = a * r;
    let w = z.powf(-nu.nu());
    let k_next_a = bessel_k(nu.next(), a)?;
    let i_next_a = bessel_i(nu.next(), a)?;
    let (i_nu, k_nu) = (bessel_i(nu, z)?, bessel_k(nu, z)?);
    let (i_next, k_next) = (bessel_i(nu.next(), z)?, bessel_k(nu.next(), z)?);
    let plus = k_next_a * w * i_nu + i_next_a * w * k_nu;
    let plus_dr = a * w * (k_next_a * i_next - i_next_a * k_next);
    let minus = w * k_nu;
    let minus_dr = -a * w * k_next;
    Ok(plus * minus_dr - plus_dr * minus)
}

/// Closed forms for `n = 3` (`nu = 1/2`), where the basis reduces to `e^{+-alpha r}/r`.
pub mod three_dim {
    /// `G(r,s) = -e^{-a|r-s|}/(2a rs) - (a-1)/(2a(a+1)) e^{-a(r+s-2)}/(rs)`.
    pub fn green(alpha: f64, r: f64, s: f64) -> f64 {
        let a = alpha;
        -(-a * (r - s).abs()).exp() / (2.0 * a * r * s)
            - (a - 1.0) / (2.0 * a * (a + 1.0)) * (-a * (r + s - 2.0)).exp() / (r * s)
    }

    /// `d/dr` of [`green`] for `r != s`.
    pub fn green_dr(alpha: f64, r: f64, s: f64) -> f64 {
        let a = alpha;
        let sign = if r > s { 1.0 } else { -1.0 };
        let e1 = (-a * (r - s).abs()).exp();
        let e2 = (-a * (r + s - 2.0)).exp();
        let c = (a - 1.0) / (2.0 * a * (a + 1.0));
        // d/dr [-e1/(2a r s)] and d/dr [-c e2/(r s)]
        e1 * (sign * a / (2.0 * a * r * s) + 1.0 / (2.0 * a * r * r * s))
            + c * e2 * (a / (r * s) + 1.0 / (r * r * s))
    }

    /// `phi_b(r) = -e^a rho_b e^{-a r} / ((a + 1) r)`.
    pub fn lifting(alpha: f64, rho_b: f64, r: f64) -> f64 {
        -rho_b * (-alpha * (r - 1.0)).exp() / ((alpha + 1.0) * r)
    }

    pub fn lifting_dr(alpha: f64, rho_b: f64, r: f64) -> f64 {
        rho_b * (-alpha * (r - 1.0)).exp() * (alpha * r + 1.0) / ((alpha + 1.0) * r * r)
    }
}

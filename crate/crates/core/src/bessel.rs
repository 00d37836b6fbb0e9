//! Modified Bessel functions `I_nu`, `K_nu` for the orders that arise from an
//! integer space dimension: `nu = (n - 2) / 2`, i.e. integers and half-integers.
//!
//! Every evaluator has an exponentially scaled twin (`e^{-x} I_nu(x)` and
//! `e^{x} K_nu(x)`). The Green kernel works exclusively with the scaled forms,
//! so arguments far beyond the double-precision exponent range stay usable
//! there. The unscaled functions refuse arguments above [`MAX_UNSCALED_ARG`].

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Largest argument accepted by the unscaled evaluators.
pub const MAX_UNSCALED_ARG: f64 = 700.0;

/// Ascending series for `I` is used up to here; the asymptotic expansion
/// beyond. At this point the neglected `e^{-2x}` contribution is ~4e-18.
const I_SERIES_LIMIT: f64 = 20.0;

/// Integer-order `K_0`, `K_1` switch from the logarithmic series to Steed's
/// continued fraction at this argument.
const K_SERIES_LIMIT: f64 = 2.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Order of a modified Bessel function, stored as `2 nu` so half-integer
/// orders are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder {
    two_nu: u32,
}

impl BesselOrder {
    pub const fn new(two_nu: u32) -> Self {
        Self { two_nu }
    }

    /// `nu = (n - 2) / 2` for the radial Helmholtz operator in dimension `n`.
    pub fn from_dimension(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        Ok(Self::new(n - 2))
    }

    pub const fn two_nu(self) -> u32 {
        self.two_nu
    }

    pub fn nu(self) -> f64 {
        f64::from(self.two_nu) / 2.0
    }

    pub const fn is_half_integer(self) -> bool {
        self.two_nu % 2 == 1
    }

    /// The order `nu + 1`.
    pub const fn next(self) -> Self {
        Self::new(self.two_nu + 2)
    }
}

impl std::fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.two_nu)
        } else {
            write!(f, "{}", self.two_nu / 2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    First,
    Second,
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "Bessel argument",
            value: x,
        })
    }
}

/// `I_nu(x)`.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64> {
    check_positive(x)?;
    if x > MAX_UNSCALED_ARG {
        return Err(Error::Overflow(format!("I_{order}({x})")));
    }
    Ok(i_scaled(order, x) * x.exp())
}

/// `K_nu(x)`.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    check_positive(x)?;
    if x > MAX_UNSCALED_ARG {
        return Err(Error::Underflow(format!("K_{order}({x})")));
    }
    Ok(k_scaled(order, x) * (-x).exp())
}

/// `e^{-x} I_nu(x)`.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(i_scaled(order, x))
}

/// `e^{x} K_nu(x)`.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(k_scaled(order, x))
}

/// `(alpha r)^{-nu} I_nu(alpha r)` or `(alpha r)^{-nu} K_nu(alpha r)`, the two
/// radial solutions of `phi'' + (n-1)/r phi' - alpha^2 phi = 0`.
pub fn weighted_basis(order: BesselOrder, alpha: f64, r: f64, kind: BasisKind) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("r must be >= 1, got {r}")));
    }
    let z = alpha * r;
    let weight = z.powf(-order.nu());
    match kind {
        BasisKind::First => Ok(weight * bessel_i(order, z)?),
        BasisKind::Second => Ok(weight * bessel_k(order, z)?),
    }
}

/// `ln Gamma(nu + 1)` for integer or half-integer `nu >= 0`.
fn ln_gamma_order_plus_one(order: BesselOrder) -> f64 {
    // Gamma(nu + 1) = nu (nu - 1) ... down to Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
    let mut acc = if order.is_half_integer() {
        0.5 * PI.ln()
    } else {
        0.0
    };
    let mut v = order.nu();
    while v > 0.0 {
        acc += v.ln();
        v -= 1.0;
    }
    acc
}

fn i_scaled(order: BesselOrder, x: f64) -> f64 {
    let nu = order.nu();
    if order.two_nu() == 1 {
        // sqrt(2/(pi x)) sinh(x) e^{-x}
        return (2.0 / (PI * x)).sqrt() * 0.5 * -(-2.0 * x).exp_m1();
    }
    if x <= I_SERIES_LIMIT || x < nu * nu {
        i_scaled_series(order, x)
    } else {
        i_scaled_asymptotic(nu, x)
    }
}

/// `e^{-x} sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1))`. All terms are positive.
fn i_scaled_series(order: BesselOrder, x: f64) -> f64 {
    let nu = order.nu();
    let lead = (nu * (0.5 * x).ln() - x - ln_gamma_order_plus_one(order)).exp();
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    lead * sum
}

/// Hankel expansion `e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k`.
fn i_scaled_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn k_scaled(order: BesselOrder, x: f64) -> f64 {
    let (k_low, k_high) = if order.is_half_integer() {
        let k_half = (FRAC_PI_2 / x).sqrt();
        (k_half, k_half * (1.0 + 1.0 / x))
    } else if x < K_SERIES_LIMIT {
        let (k0, k1) = k01_series(x);
        let scale = x.exp();
        (k0 * scale, k1 * scale)
    } else {
        k01_scaled_steed(x)
    };
    // Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m is stable for K.
    let base_two_nu = if order.is_half_integer() { 1 } else { 0 };
    if order.two_nu() == base_two_nu {
        return k_low;
    }
    let mut prev = k_low;
    let mut cur = k_high;
    let mut two_m = base_two_nu + 2;
    while two_m < order.two_nu() {
        let m = f64::from(two_m) / 2.0;
        let next = prev + 2.0 * m / x * cur;
        prev = cur;
        cur = next;
        two_m += 2;
    }
    cur
}

/// Unscaled `K_0(x)`, `K_1(x)` from the logarithmic ascending series, `x < 2`.
fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // I_0, and sum_{k>=1} q^k/(k!)^2 H_k
    let mut i0 = 1.0;
    let mut harmonic_sum = 0.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    // I_1 = (x/2) sum q^k/(k!(k+1)!), and the digamma-weighted companion
    let mut i1_sum = 1.0;
    let mut psi_sum = -2.0 * EULER_GAMMA + 1.0; // psi(1) + psi(2)
    let mut term1 = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        harmonic += 1.0 / k;
        i0 += term;
        harmonic_sum += term * harmonic;

        term1 *= q / (k * (k + 1.0));
        i1_sum += term1;
        // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
        psi_sum += term1 * (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (k + 1.0));
        if term < 1e-18 * i0 && term1 < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -(log_half + EULER_GAMMA) * i0 + harmonic_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * psi_sum;
    (k0, k1)
}

/// Scaled `K_0`, `K_1` for `x >= 2` by Steed's evaluation of the
/// Thompson-Barnett continued fraction (order mu = 0).
fn k01_scaled_steed(x: f64) -> (f64, f64) {
    const MAX_ITER: usize = 10_000;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (FRAC_PI_2 / x).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

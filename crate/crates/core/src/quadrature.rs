//! Product integration of `e^{-z u} p(u)` over a single mesh interval, where
//! `p` interpolates samples on a local stencil of up to six nodes.

/// Number of interpolation nodes per interval.
pub(crate) const WIDTH: usize = 6;

/// `E_k(z) = int_0^1 e^{-z u} u^k du` for `k < WIDTH`.
pub(crate) fn exp_moments(z: f64) -> [f64; WIDTH] {
    let mut out = [0.0; WIDTH];
    if z < 3.0 {
        // sum_j (-z)^j / (j! (j + k + 1))
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut sum = 0.0;
            for j in 0..80 {
                let add = term / (j + k + 1) as f64;
                sum += add;
                if add.abs() < 1e-18 * sum.abs() {
                    break;
                }
                term *= -z / (j + 1) as f64;
            }
            *slot = sum;
        }
    } else {
        // E_k = k!/z^{k+1} (1 - e^{-z} sum_{j<=k} z^j/j!)
        let ez = (-z).exp();
        let mut partial = 0.0;
        let mut zj = 1.0;
        let mut fact = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
                zj *= z / k as f64;
            }
            partial += zj;
            *slot = fact / z.powi(k as i32 + 1) * (1.0 - ez * partial);
        }
    }
    out
}

/// Stencil start for interval `[i, i+1]` on a mesh of `m` nodes.
pub(crate) fn stencil_start(i: usize, m: usize) -> usize {
    let width = m.min(WIDTH);
    i.saturating_sub(WIDTH / 2 - 1).min(m - width)
}

/// Weights `w_k` with `int_0^1 e^{-z u} p(u) du * h = sum_k w_k g_k`, where `p`
/// interpolates `g_k` at local coordinates `t_k` (`u = 0, 1` are the interval ends).
pub(crate) fn product_weights(t: &[f64], z: f64, h: f64) -> [f64; WIDTH] {
    let moments = exp_moments(z);
    let mut w = [0.0; WIDTH];
    for k in 0..t.len() {
        // coefficients of prod_{m != k} (u - t_m), lowest degree first
        let mut coef = [0.0; WIDTH];
        coef[0] = 1.0;
        let mut degree = 0;
        let mut denom = 1.0;
        for (m, &tm) in t.iter().enumerate() {
            if m == k {
                continue;
            }
            for d in (0..=degree).rev() {
                coef[d + 1] += coef[d];
                coef[d] *= -tm;
            }
            degree += 1;
            denom *= t[k] - tm;
        }
        let integral: f64 = coef.iter().zip(&moments).map(|(c, e)| c * e).sum();
        w[k] = h * integral / denom;
    }
    w
}

/// Integration rule for interval `i` of `nodes`: stencil start and weights for
/// `int_{r_i}^{r_{i+1}} e^{-z (s - r_i)/h} g(s) ds` (`from_left`) or
/// `int_{r_i}^{r_{i+1}} e^{-z (r_{i+1} - s)/h} g(s) ds` (otherwise).
pub(crate) fn interval_rule(
    nodes: &[f64],
    i: usize,
    z: f64,
    from_left: bool,
) -> (usize, [f64; WIDTH]) {
    let m = nodes.len();
    let j0 = stencil_start(i, m);
    let width = m.min(WIDTH);
    let h = nodes[i + 1] - nodes[i];
    let mut t = [0.0; WIDTH];
    for (k, slot) in t.iter_mut().take(width).enumerate() {
        *slot = if from_left {
            (nodes[j0 + k] - nodes[i]) / h
        } else {
            (nodes[i + 1] - nodes[j0 + k]) / h
        };
    }
    (j0, product_weights(&t[..width], z, h))
}

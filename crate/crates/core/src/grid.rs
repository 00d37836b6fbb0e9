//! Truncated radial mesh on `[1, R_max]` with composite Simpson weights.
//!
//! The mesh is a sequence of Simpson panels, each made of two equal
//! sub-intervals. Panels are uniform inside the boundary layer next to the
//! wall and then grow geometrically up to a fixed maximal spacing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::interval_rule;

/// Largest node spacing anywhere on the mesh.
pub const MAX_SPACING: f64 = 0.2;
/// Panel-to-panel growth factor outside the boundary layer.
const GROWTH: f64 = 1.02;
/// Width of the uniform layer next to the wall, in units of `1/alpha`.
const LAYER_WIDTHS: f64 = 10.0;

/// How the far-field condition decays, which sets the automatic truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    /// `e^{-alpha r}` tails: `R_max = 1 + max(40/alpha, 20)`.
    Exponential,
    /// `r^{-2(n-1)}` tails: `R_max = max(10^{4/(2(n-1))}, 50)`.
    Algebraic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOptions {
    #[serde(default = "default_points_per_unit_alpha")]
    pub points_per_unit_alpha: f64,
    /// Fixed truncation radius; `None` selects the automatic policy.
    #[serde(default, rename = "R_max")]
    pub r_max: Option<f64>,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
}

fn default_points_per_unit_alpha() -> f64 {
    10.0
}

fn default_max_nodes() -> usize {
    2_000_000
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            points_per_unit_alpha: default_points_per_unit_alpha(),
            r_max: None,
            max_nodes: default_max_nodes(),
        }
    }
}

pub fn auto_r_max(n: u32, alpha: f64, decay: Decay) -> f64 {
    match decay {
        Decay::Exponential => 1.0 + (40.0 / alpha).max(20.0),
        Decay::Algebraic => 10f64.powf(4.0 / (2.0 * (n as f64 - 1.0))).max(50.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    n: u32,
}

impl RadialGrid {
    /// Builds a mesh from Simpson panel widths laid end to end from `r = 1`.
    fn from_panels(n: u32, panels: &[f64]) -> Self {
        let mut nodes = Vec::with_capacity(2 * panels.len() + 1);
        let mut weights = vec![0.0; 2 * panels.len() + 1];
        nodes.push(1.0);
        let mut left = 1.0;
        for (p, &w) in panels.iter().enumerate() {
            let right = if p + 1 == panels.len() { 1.0 + panels.iter().sum::<f64>() } else { left + w };
            let h = (right - left) / 2.0;
            nodes.push(left + h);
            nodes.push(right);
            weights[2 * p] += h / 3.0;
            weights[2 * p + 1] += 4.0 * h / 3.0;
            weights[2 * p + 2] += h / 3.0;
            left = right;
        }
        Self { nodes, weights, n }
    }

    /// Mesh with uniform node spacing `h` on `[1, r_max]`; `h` is shrunk so that
    /// the interval holds a whole number of panels.
    pub fn uniform(n: u32, r_max: f64, h: f64) -> Result<Self> {
        check_r_max(r_max)?;
        let panels = ((r_max - 1.0) / (2.0 * h)).ceil().max(1.0) as usize;
        let w = (r_max - 1.0) / panels as f64;
        let mut grid = Self::from_panels(n, &vec![w; panels]);
        *grid.nodes.last_mut().unwrap() = r_max;
        Ok(grid)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights for `int_1^{R_max} f(r) dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Splits every sub-interval in two, halving all spacings.
    pub fn refined(&self) -> Self {
        let panels: Vec<f64> = self.nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let mut grid = Self::from_panels(self.n, &panels);
        *grid.nodes.last_mut().unwrap() = self.r_max();
        grid
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.nodes.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                got: len,
            })
        }
    }

    /// `r^{n-1}` at every node.
    pub fn measure(&self) -> Vec<f64> {
        let p = self.n as i32 - 1;
        self.nodes.iter().map(|r| r.powi(p)).collect()
    }
}

fn check_r_max(r_max: f64) -> Result<()> {
    if r_max > 1.0 && r_max.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("R_max must exceed 1, got {r_max}")))
    }
}

/// Graded mesh: spacing `min(0.2, 1/(points_per_unit_alpha * alpha))` in the
/// layer `[1, 1 + 10/alpha]`, then geometric coarsening up to spacing 0.2.
pub fn build_grid(n: u32, alpha: f64, options: &GridOptions, decay: Decay) -> Result<RadialGrid> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    if !(options.points_per_unit_alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "points_per_unit_alpha must be positive, got {}",
            options.points_per_unit_alpha
        )));
    }
    let r_max = options.r_max.unwrap_or_else(|| auto_r_max(n, alpha, decay));
    check_r_max(r_max)?;
    let length = r_max - 1.0;
    let h0 = MAX_SPACING.min(1.0 / (options.points_per_unit_alpha * alpha));
    let layer = (LAYER_WIDTHS / alpha).min(length);
    let max_panels = options.max_nodes.saturating_sub(1) / 2;

    let mut panels = Vec::new();
    let mut covered = 0.0;
    let mut width = 2.0 * h0;
    while covered < length * (1.0 - 1e-12) {
        if panels.len() >= max_panels {
            let estimate = estimate_nodes(length - covered, width) + 2 * panels.len() + 1;
            return Err(Error::GridTooLarge {
                nodes: estimate,
                cap: options.max_nodes,
            });
        }
        panels.push(width);
        covered += width;
        if covered >= layer {
            width = (width * GROWTH).min(2.0 * MAX_SPACING);
        }
    }
    // The last panel overshoots R_max; shrink all widths proportionally.
    let scale = length / covered;
    for w in &mut panels {
        *w *= scale;
    }
    let mut grid = RadialGrid::from_panels(n, &panels);
    *grid.nodes.last_mut().unwrap() = r_max;
    Ok(grid)
}

fn estimate_nodes(remaining: f64, width: f64) -> usize {
    (2.0 * remaining / width).ceil() as usize
}

/// `int_1^{R_max} f(r) dr`.
pub fn integrate(grid: &RadialGrid, f: &[f64]) -> Result<f64> {
    grid.check_len(f.len())?;
    Ok(grid.weights.iter().zip(f).map(|(w, v)| w * v).sum())
}

/// `(int_1^{R_max} |f|^2 r^{n-1} dr)^{1/2}`.
pub fn weighted_l2_norm(grid: &RadialGrid, f: &[f64]) -> Result<f64> {
    grid.check_len(f.len())?;
    let p = grid.n as i32 - 1;
    let sum: f64 = grid
        .weights
        .iter()
        .zip(&grid.nodes)
        .zip(f)
        .map(|((w, r), v)| w * r.powi(p) * v * v)
        .sum();
    Ok(sum.sqrt())
}

pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `T_i = int_{r_i}^{R_max} g(s) ds` with `T_last = 0`.
///
/// Panel ends use Simpson's rule; a panel midpoint adds the quadratic
/// interpolant's integral over the right half of its panel.
pub fn reverse_cumulative(grid: &RadialGrid, g: &[f64]) -> Result<Vec<f64>> {
    grid.check_len(g.len())?;
    let m = grid.nodes.len();
    let mut t = vec![0.0; m];
    let mut k = m - 1;
    while k >= 2 {
        let h = (grid.nodes[k] - grid.nodes[k - 2]) / 2.0;
        let (g0, g1, g2) = (g[k - 2], g[k - 1], g[k]);
        t[k - 1] = t[k] + h / 12.0 * (-g0 + 8.0 * g1 + 5.0 * g2);
        t[k - 2] = t[k] + h / 3.0 * (g0 + 4.0 * g1 + g2);
        k -= 2;
    }
    Ok(t)
}

/// `C_i = int_1^{r_i} g(s) ds` by piecewise quintic interpolation of `g`.
pub fn cumulative(grid: &RadialGrid, g: &[f64]) -> Result<Vec<f64>> {
    grid.check_len(g.len())?;
    let mut c = vec![0.0; g.len()];
    for i in 0..g.len() - 1 {
        let (j0, w) = interval_rule(&grid.nodes, i, 0.0, true);
        let piece: f64 = w.iter().zip(&g[j0..]).map(|(w, v)| w * v).sum();
        c[i + 1] = c[i] + piece;
    }
    Ok(c)
}

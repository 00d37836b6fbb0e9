//! JSON run configuration: parse, default, validate.

use std::path::PathBuf;

use nsk_core::grid::GridOptions;
use nsk_core::model::ModelParams;
use nsk_core::rate_study::Norm;
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Keys every configuration must provide.
pub const REQUIRED_KEYS: [&str; 7] = ["n", "gamma", "kappa", "mu", "rho_plus", "rho_b", "u_minus"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: u32,
    gamma: f64,
    kappa: f64,
    mu: f64,
    rho_plus: f64,
    rho_b: f64,
    u_minus: f64,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    max_iter: Option<usize>,
    #[serde(default)]
    grid: Option<GridOptions>,
    #[serde(default)]
    kappas: Option<Vec<f64>>,
    #[serde(default)]
    norms: Option<Vec<Norm>>,
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: GridOptions,
    pub tol: f64,
    pub max_iter: usize,
    /// Rate-study sweep; `None` selects the default sequence.
    pub kappas: Option<Vec<f64>>,
    /// Rate-study norms; `None` selects the defaults of the mode.
    pub norms: Option<Vec<Norm>>,
    /// Output path used when no `--out` flag is given.
    pub out: Option<PathBuf>,
}

/// Parses and validates a configuration document. `kappa` may be omitted when
/// `kappa_optional` is set; it then defaults to the first entry of `kappas`
/// (or 1).
pub fn parse_config_with(text: &str, kappa_optional: bool) -> Result<RunConfig, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    let Some(object) = value.as_object() else {
        return Err(CliError::Config("configuration must be a JSON object".to_string()));
    };
    let missing: Vec<&str> = REQUIRED_KEYS
        .iter()
        .copied()
        .filter(|k| !object.contains_key(*k) && !(kappa_optional && *k == "kappa"))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!(
            "missing required keys: {}",
            missing.join(", ")
        )));
    }
    let raw: RawConfig = if object.contains_key("kappa") {
        serde_json::from_str(text)
    } else {
        let mut filled = object.clone();
        let first = object
            .get("kappas")
            .and_then(|k| k.get(0))
            .cloned()
            .unwrap_or(serde_json::json!(1.0));
        filled.insert("kappa".to_string(), first);
        serde_json::from_value(serde_json::Value::Object(filled))
    }
    .map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;

    let model = ModelParams {
        n: raw.n,
        gamma: raw.gamma,
        kappa: raw.kappa,
        mu: raw.mu,
        rho_plus: raw.rho_plus,
        rho_b: raw.rho_b,
        u_minus: raw.u_minus,
    };
    model
        .validate()
        .map_err(|e| CliError::Config(e.to_string().replace("invalid parameter: ", "")))?;
    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Config(format!("tol must be positive, got {tol}")));
    }
    let max_iter = raw.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    if max_iter == 0 {
        return Err(CliError::Config("max_iter must be at least 1".to_string()));
    }
    let grid = raw.grid.unwrap_or_default();
    if !(grid.points_per_unit_alpha > 0.0 && grid.points_per_unit_alpha.is_finite()) {
        return Err(CliError::Config(format!(
            "grid.points_per_unit_alpha must be positive, got {}",
            grid.points_per_unit_alpha
        )));
    }
    if let Some(r) = grid.r_max {
        if !(r > 1.0 && r.is_finite()) {
            return Err(CliError::Config(format!("grid.R_max must exceed 1, got {r}")));
        }
    }
    if let Some(norms) = &raw.norms {
        if norms.is_empty() {
            return Err(CliError::Config("no norms selected".to_string()));
        }
    }
    Ok(RunConfig {
        model,
        grid,
        tol,
        max_iter,
        kappas: raw.kappas,
        norms: raw.norms,
        out: raw.out,
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with(text, false)
}

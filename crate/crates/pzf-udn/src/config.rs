//! Experiment descriptions: presets, `key = value` config files and flag
//! overrides, applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pzf_udn_core::analytic::{Method, NetworkParams};
use pzf_udn_core::simulator::{SimConfig, SimModel};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::usage(format!("unknown output format `{s}` (expected csv or json)"))),
        }
    }
}

/// Built-in scenarios matching the published figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Success probability against `M`, λ = 1e-2, `N_R` = 10.
    Fig1Left,
    /// Success probability against `M`, λ = 2e-2, `N_R` = 20.
    Fig1Right,
    /// Against λ with `N_R` = 10, `M` = 5.
    Fig2,
    /// Against θ with `N_R` = 10, `M` = 5, λ = 1e-2.
    Fig3,
    /// Optimal `M` against λ for several antenna counts.
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig1Left,
        Preset::Fig1Right,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1Left => "fig1l",
            Preset::Fig1Right => "fig1r",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    pub fn spec(&self) -> ExperimentSpec {
        let mut spec = ExperimentSpec::default();
        match self {
            Preset::Fig1Left => {}
            Preset::Fig1Right => {
                spec.lambda_grid = vec![2e-2];
                spec.n_r = vec![20];
                spec.m_grid = (0..20).collect();
            }
            Preset::Fig2 => {
                spec.lambda_grid = vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1];
                spec.m_grid = vec![5];
                spec.methods.retain(|m| *m != Method::ExactM0);
            }
            Preset::Fig3 => {
                spec.theta_grid = vec![
                    1e-2, 2e-2, 5e-2, 1e-1, 2e-1, 5e-1, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0,
                ];
                spec.m_grid = vec![5];
                spec.methods.retain(|m| *m != Method::ExactM0);
            }
            Preset::Fig4 => {
                spec.lambda_grid = vec![1e-3, 2e-3, 3e-3, 5e-3, 1e-2, 2e-2, 3e-2, 5e-2, 1e-1];
                spec.n_r = vec![4, 8, 12, 16, 20];
                spec.methods = vec![Method::ExactM0, Method::Approx];
            }
        }
        spec
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::usage(format!("unknown preset `{s}` (expected fig1l, fig1r, fig2, fig3 or fig4)")))
    }
}

/// Everything a sweep needs. `network.lambda` is ignored in favour of
/// `lambda_grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub network: NetworkParams,
    /// Antenna counts; sweeps take exactly one, the optimal-`M` table any number.
    pub n_r: Vec<u32>,
    pub theta_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub m_grid: Vec<u32>,
    pub methods: Vec<Method>,
    /// Monte Carlo settings; `sim.model` selects the `mc_exact` sampler.
    pub sim: SimConfig,
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
    /// Add a wall-time column. Off by default so output stays reproducible.
    pub timing: bool,
}

impl Default for ExperimentSpec {
    /// The `fig1l` scenario.
    fn default() -> Self {
        Self {
            network: NetworkParams::reference(1e-2),
            n_r: vec![10],
            theta_grid: vec![1.0],
            lambda_grid: vec![1e-2],
            m_grid: (0..10).collect(),
            methods: Method::ALL.to_vec(),
            sim: SimConfig::default(),
            output_path: None,
            output_format: Format::Csv,
            timing: false,
        }
    }
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("`{key}`: cannot parse `{}`", value.trim())))
}

/// Comma-separated list; integer keys also accept an inclusive `lo..=hi`.
fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_scalar(key, s))
        .collect::<Result<_>>()?;
    Ok(items)
}

fn parse_int_list(key: &str, value: &str) -> Result<Vec<u32>> {
    if let Some((lo, hi)) = value.split_once("..=") {
        let lo: u32 = parse_scalar(key, lo)?;
        let hi: u32 = parse_scalar(key, hi)?;
        if lo > hi {
            return Err(CliError::usage(format!("`{key}`: empty range `{value}`")));
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(key, value)
}

impl ExperimentSpec {
    /// Every key accepted by [`ExperimentSpec::set`].
    pub const KEYS: [&'static str; 16] = [
        "lambda_grid",
        "alpha",
        "rho0",
        "rho",
        "r0",
        "n_r",
        "theta_grid",
        "m_grid",
        "methods",
        "trials",
        "seed",
        "window_points_target",
        "confidence_level",
        "model",
        "output_path",
        "output_format",
    ];

    /// Overrides one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "lambda_grid" => self.lambda_grid = parse_list(key, v)?,
            "alpha" => self.network.alpha = parse_scalar(key, v)?,
            "rho0" => self.network.rho0 = parse_scalar(key, v)?,
            "rho" => self.network.rho = parse_scalar(key, v)?,
            "r0" => self.network.r0 = parse_scalar(key, v)?,
            "n_r" => self.n_r = parse_int_list(key, v)?,
            "theta_grid" => self.theta_grid = parse_list(key, v)?,
            "m_grid" => self.m_grid = parse_int_list(key, v)?,
            "methods" => {
                self.methods = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<Method>()
                            .map_err(|_| CliError::usage(format!("unknown method `{s}`")))
                    })
                    .collect::<Result<_>>()?
            }
            "trials" => self.sim.trials = parse_scalar(key, v)?,
            "seed" => self.sim.seed = parse_scalar(key, v)?,
            "window_points_target" => self.sim.window_points_target = parse_scalar(key, v)?,
            "confidence_level" => self.sim.confidence_level = parse_scalar(key, v)?,
            "model" => {
                self.sim.model = match v {
                    "exact" => SimModel::Exact,
                    "gamma_shortcut" => SimModel::GammaShortcut,
                    _ => {
                        return Err(CliError::usage(format!(
                            "`model` selects the mc_exact sampler: exact or gamma_shortcut, got `{v}`"
                        )))
                    }
                }
            }
            "output_path" => self.output_path = Some(PathBuf::from(v)),
            "output_format" => self.output_format = v.parse()?,
            _ => {
                return Err(CliError::usage(format!(
                    "unknown key `{key}` (known keys: {})",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` starts a comment.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::usage(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_config_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_config(&text)
    }

    /// Network parameters at density `lambda`.
    pub fn network_at(&self, lambda: f64) -> NetworkParams {
        NetworkParams {
            lambda,
            ..self.network
        }
    }

    fn validate_common(&self) -> Result<()> {
        let usage = |e: pzf_udn_core::Error| CliError::usage(e.to_string());
        for &lambda in &self.lambda_grid {
            self.network_at(lambda).validate().map_err(usage)?;
        }
        if self.lambda_grid.is_empty() || self.theta_grid.is_empty() || self.n_r.is_empty() {
            return Err(CliError::usage("lambda_grid, theta_grid and n_r must be non-empty"));
        }
        if let Some(t) = self.theta_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(CliError::usage(format!("theta must be positive and finite, got {t}")));
        }
        if self.n_r.contains(&0) {
            return Err(CliError::usage("n_r must be at least 1"));
        }
        self.sim.validate().map_err(usage)
    }

    /// Checks the invariants of a one-dimensional sweep.
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate_common()?;
        if self.methods.is_empty() {
            return Err(CliError::usage("method list is empty"));
        }
        if self.m_grid.is_empty() {
            return Err(CliError::usage("m_grid must be non-empty"));
        }
        let [n_r] = self.n_r[..] else {
            return Err(CliError::usage("sweep takes a single n_r"));
        };
        if let Some(m) = self.m_grid.iter().find(|m| **m >= n_r) {
            return Err(CliError::usage(format!("m = {m} needs m < n_r = {n_r}")));
        }
        let axes = [self.theta_grid.len(), self.lambda_grid.len(), self.m_grid.len()];
        if axes.iter().filter(|len| **len > 1).count() > 1 {
            return Err(CliError::usage(
                "only one of theta_grid, lambda_grid and m_grid may hold more than one value",
            ));
        }
        Ok(())
    }

    /// Checks the invariants of an optimal-`M` table.
    pub fn validate_optimal_m(&self) -> Result<()> {
        self.validate_common()?;
        if self.theta_grid.len() > 1 {
            return Err(CliError::usage("optimal-m takes a single theta"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in Preset::ALL {
            let spec = p.spec();
            if p == Preset::Fig4 {
                spec.validate_optimal_m().unwrap();
            } else {
                spec.validate_sweep().unwrap();
            }
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }

    #[test]
    fn config_lines_override_fields() {
        let mut spec = ExperimentSpec::default();
        spec.apply_config(
            "# comment\nlambda_grid = 1e-3, 2e-3\n\nm_grid = 5\nmethods = approx,mc_exact # trailing\nseed=7\nmodel = exact\n",
        )
        .unwrap();
        assert_eq!(spec.lambda_grid, vec![1e-3, 2e-3]);
        assert_eq!(spec.m_grid, vec![5]);
        assert_eq!(spec.methods, vec![Method::Approx, Method::McExact]);
        assert_eq!(spec.sim.seed, 7);
        assert_eq!(spec.sim.model, SimModel::Exact);
        spec.validate_sweep().unwrap();
    }

    #[test]
    fn integer_ranges() {
        let mut spec = ExperimentSpec::default();
        spec.set("m_grid", "2..=4").unwrap();
        assert_eq!(spec.m_grid, vec![2, 3, 4]);
        assert!(spec.set("m_grid", "4..=2").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let mut spec = ExperimentSpec::default();
        assert!(spec.set("lambda", "1").is_err());
        assert!(spec.set("trials", "many").is_err());
        assert!(spec.apply_config("seed 3").is_err());

        let mut two_axes = ExperimentSpec::default();
        two_axes.set("lambda_grid", "1e-3,1e-2").unwrap();
        assert!(two_axes.validate_sweep().is_err());

        let mut no_methods = ExperimentSpec::default();
        no_methods.set("methods", "").unwrap();
        assert!(matches!(no_methods.validate_sweep(), Err(CliError::Usage(_))));

        let mut bad_alpha = ExperimentSpec::default();
        bad_alpha.set("alpha", "2").unwrap();
        assert!(bad_alpha.validate_sweep().is_err());
    }
}

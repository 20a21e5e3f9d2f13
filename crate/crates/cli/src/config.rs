use std::path::{Path, PathBuf};

use elastica_mkdv::flow::{RhsMode, Scheme};
use elastica_mkdv::io::LoopSpec;
use elastica_mkdv::Tolerances;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Output format families a command may emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
    Latex,
}

/// Partial overrides of [`Tolerances`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wind: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_floor: Option<f64>,
}

impl TolOverrides {
    fn or(self, base: Self) -> Self {
        Self {
            unit: self.unit.or(base.unit),
            mean: self.mean.or(base.mean),
            wind: self.wind.or(base.wind),
            identity: self.identity.or(base.identity),
            k_floor: self.k_floor.or(base.k_floor),
        }
    }

    pub fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            unit: self.unit.unwrap_or(d.unit),
            mean: self.mean.unwrap_or(d.mean),
            wind: self.wind.unwrap_or(d.wind),
            identity: self.identity.unwrap_or(d.identity),
            k_floor: self.k_floor.unwrap_or(d.k_floor),
        }
    }
}

/// Every setting a run can take. A config file and the command-line flags
/// both produce one of these; flags win field by field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(rename = "loop", skip_serializing_if = "Option::is_none")]
    pub loop_spec: Option<LoopSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grunsky_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<RhsMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub immersion: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_dt: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_drift_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kdv: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_fields: Option<usize>,
    #[serde(skip_serializing_if = "TolOverrides::is_empty")]
    pub tolerances: TolOverrides,
}

impl TolOverrides {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

macro_rules! prefer {
    ($flags:ident, $base:ident; $($field:ident),* $(,)?) => {
        RunConfig {
            $($field: $flags.$field.or($base.$field),)*
            tolerances: $flags.tolerances.or($base.tolerances),
        }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// `flags` layered over `self`.
    pub fn overridden_by(self, flags: Self) -> Self {
        let base = self;
        prefer!(flags, base;
            input, loop_spec, out, formats, seed, grid, dt, t_end, n, n_max, order,
            grunsky_order, mode, scheme, record_every, immersion, sweep_dt, energy_tol,
            mean_drift_tol, closure_tol, residual_tol, a, truncated, symbolic, kdv, lambda,
            mu, random_fields,
        )
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.as_ref().is_none_or(|v| v.contains(&f))
    }

    pub fn tol(&self) -> Tolerances {
        self.tolerances.resolve()
    }

    /// The loop named by `input`, or the inline `loop`, with `N` overridden
    /// when given.
    pub fn loop_spec(&self) -> Result<LoopSpec, CliError> {
        let mut spec = match (&self.input, &self.loop_spec) {
            (Some(path), _) => LoopSpec::load(path)?,
            (None, Some(spec)) => spec.clone(),
            (None, None) => return Err(CliError::Usage("a loop spec is required (--input)".into())),
        };
        if let Some(n) = self.grid {
            spec.n = Some(n);
        }
        spec.grid_size()?;
        Ok(spec)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")))
    }
}

pub fn at_least(name: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be at least {min}, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file_values() {
        let file: RunConfig =
            serde_json::from_str(r#"{"dt": 0.001, "T": 0.5, "tolerances": {"unit": 1e-9}}"#).unwrap();
        let flags = RunConfig {
            dt: Some(1e-4),
            tolerances: TolOverrides {
                mean: Some(1e-12),
                ..Default::default()
            },
            ..Default::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.dt, Some(1e-4));
        assert_eq!(merged.t_end, Some(0.5));
        let tol = merged.tol();
        assert_eq!((tol.unit, tol.mean), (1e-9, 1e-12));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"dtt": 1}"#).is_err());
        let mode: RunConfig = serde_json::from_str(r#"{"mode": "symbolic", "scheme": "gauss-legendre4"}"#).unwrap();
        assert_eq!(mode.mode, Some(RhsMode::Symbolic));
    }

    #[test]
    fn formats_default_to_everything() {
        let cfg = RunConfig::default();
        assert!(cfg.wants(Format::Svg));
        let only = RunConfig {
            formats: Some(vec![Format::Json]),
            ..Default::default()
        };
        assert!(only.wants(Format::Json) && !only.wants(Format::Csv));
    }
}

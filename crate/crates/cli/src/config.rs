//! Experiment configuration: INI-style TOML sections with flag overrides.

use std::path::{Path, PathBuf};

use obslab::geometry::{Family, ObservationField};
use obslab::spectral::{MaskKind, Weight};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Observation field parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    /// Family name, or `grid` for a raw grid file.
    pub family: String,
    pub dim: usize,
    pub period: f64,
    pub n: usize,
    pub value: f64,
    pub delta: f64,
    pub beta: f64,
    pub e: Vec<[f64; 2]>,
    pub f: Vec<[f64; 2]>,
    /// Radius of the disc average applied after sampling; `0` keeps the
    /// samples.
    pub mollify: f64,
    pub grid_file: Option<PathBuf>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            family: "periodic-square".into(),
            dim: 2,
            period: 8.0,
            n: 256,
            value: 1.0,
            delta: 0.3,
            beta: 0.5,
            e: vec![[0.0, 0.6]],
            f: vec![[0.0, 0.6]],
            mollify: 0.0,
            grid_file: None,
        }
    }
}

/// Sweep axes and scalar parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Frequencies; empty selects a command specific default.
    pub lambda: Vec<f64>,
    /// Observation times.
    pub t: Vec<f64>,
    /// Diagonal segment length of product coverings.
    pub l: f64,
    /// Partition length of the construction demo.
    pub m: f64,
    pub rho: f64,
    /// Propagator exponent `beta` in `exp(-i |xi|^(beta+1) t)`.
    pub beta: f64,
    /// Dirichlet exponent of periodic coverings.
    pub gamma: f64,
    /// Cutoff radius of resolvent and Gramian computations.
    pub cutoff: Option<f64>,
    /// Ball radius of the construction demo.
    pub ball_delta: f64,
    /// Length of the construction demo interval.
    pub length: f64,
    /// Resolvent decay exponent for the arbitrary-time shape fit.
    pub eps_decay: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambda: Vec::new(),
            t: Vec::new(),
            l: 20.0,
            m: 1.0,
            rho: 0.5,
            beta: 0.5,
            gamma: 0.25,
            cutoff: None,
            ball_delta: 0.04,
            length: 16.0,
            eps_decay: None,
        }
    }
}

/// Spectral computation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    /// `annulus`, `sector`, `annulus-sector`, `rectangle` or `ball`; the
    /// swept `lambda` is the annulus radius, rectangle corner or ball radius.
    pub mask: String,
    /// `sqrt`, `full` or `both`.
    pub weight: String,
    /// Annulus half width `delta lambda^-beta` uses these two.
    pub delta: f64,
    pub beta: f64,
    pub angle: f64,
    pub eps0: f64,
    pub sigma: f64,
    /// Symbol exponent of the resolvent operator `|xi|^gamma`.
    pub symbol_gamma: f64,
    /// Observation weight `m`; calibrated at `lambda0` when absent.
    pub m: Option<f64>,
    pub lambda0: f64,
    pub dense_limit: usize,
    pub tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            mask: "annulus".into(),
            weight: "both".into(),
            delta: 2.0,
            beta: 0.0,
            angle: 0.0,
            eps0: 0.25,
            sigma: 4.0,
            symbol_gamma: 1.5,
            m: None,
            lambda0: 4.0,
            dense_limit: 2000,
            tol: 1e-8,
        }
    }
}

/// Run-level settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Experiment executed by `obslab run`.
    pub experiment: Option<String>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Adds a wall-time column to CSV tables (breaks byte identity).
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: None,
            seed: 1,
            output_dir: None,
            timing: false,
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: FieldConfig,
    pub sweep: SweepConfig,
    pub spectral: SpectralConfig,
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    /// Range checks that name the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        let check = |ok: bool, key: &str, value: String, range: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::usage(format!("{key} = {value} is outside the valid range {range}")))
            }
        };
        check((0.0..=1.0).contains(&self.sweep.beta), "sweep.beta", self.sweep.beta.to_string(), "[0,1]")?;
        check((0.0..=1.0).contains(&self.field.beta), "field.beta", self.field.beta.to_string(), "[0,1]")?;
        check(self.sweep.rho > 0.0, "sweep.rho", self.sweep.rho.to_string(), "(0,inf)")?;
        check(
            self.sweep.gamma > 0.0 && self.sweep.gamma < 0.5,
            "sweep.gamma",
            self.sweep.gamma.to_string(),
            "(0,1/2)",
        )?;
        check(self.field.dim == 1 || self.field.dim == 2, "field.dim", self.field.dim.to_string(), "{1,2}")?;
        check(self.field.mollify >= 0.0, "field.mollify", self.field.mollify.to_string(), "[0,inf)")?;
        check(self.spectral.symbol_gamma > 0.0, "spectral.symbol_gamma", self.spectral.symbol_gamma.to_string(), "(0,inf)")?;
        for (key, list) in [("sweep.lambda", &self.sweep.lambda), ("sweep.t", &self.sweep.t)] {
            if let Some(v) = list.iter().find(|v| !v.is_finite()) {
                return Err(CliError::usage(format!("{key} contains the non-finite value {v}")));
            }
        }
        Ok(())
    }

    /// The observation field described by `[field]`.
    pub fn build_field(&self) -> Result<ObservationField, CliError> {
        let c = &self.field;
        let family = match c.family.as_str() {
            "constant" => Family::Constant { value: c.value },
            "periodic-square" | "periodic" => Family::PeriodicSquare { delta: c.delta },
            "product" => Family::Product {
                e: c.e.clone(),
                f: c.f.clone(),
            },
            "e-beta" => Family::EBeta { beta: c.beta },
            "half-strip-comb" => Family::HalfStripComb,
            "grid" | "custom-grid" => {
                let path = c
                    .grid_file
                    .as_ref()
                    .ok_or_else(|| CliError::usage("field.family = grid needs field.grid_file"))?;
                let field = ObservationField::read_grid(path).map_err(|e| CliError::from_core("field.grid_file", e))?;
                return self.mollify(field);
            }
            other => {
                return Err(CliError::usage(format!(
                    "field.family = {other} is unknown; run `obslab list-families`"
                )))
            }
        };
        let field = ObservationField::from_family(c.dim, family, c.period, c.n).map_err(|e| CliError::from_core("field", e))?;
        self.mollify(field)
    }

    fn mollify(&self, field: ObservationField) -> Result<ObservationField, CliError> {
        field
            .mollified(self.field.mollify)
            .map_err(|e| CliError::from_core("field.mollify", e))
    }

    /// Mask for sweep value `lambda`.
    pub fn mask_kind(&self, lambda: f64) -> Result<MaskKind, CliError> {
        let s = &self.spectral;
        Ok(match s.mask.as_str() {
            "annulus" => MaskKind::Annulus {
                lambda,
                delta: s.delta,
                beta: s.beta,
            },
            "sector" => MaskKind::Sector {
                angle: s.angle,
                eps0: s.eps0,
            },
            "annulus-sector" => MaskKind::AnnulusSector {
                lambda,
                delta: s.delta,
                beta: s.beta,
                angle: s.angle,
                eps0: s.eps0,
            },
            "rectangle" => MaskKind::Rectangle {
                zeta: lambda,
                sigma: s.sigma,
            },
            "ball" => MaskKind::Ball { radius: lambda },
            other => {
                return Err(CliError::usage(format!(
                    "spectral.mask = {other} is not one of annulus, sector, annulus-sector, rectangle, ball"
                )))
            }
        })
    }

    pub fn weights(&self) -> Result<Vec<Weight>, CliError> {
        match self.spectral.weight.as_str() {
            "sqrt" => Ok(vec![Weight::Sqrt]),
            "full" => Ok(vec![Weight::Full]),
            "both" => Ok(vec![Weight::Sqrt, Weight::Full]),
            other => Err(CliError::usage(format!("spectral.weight = {other} is not one of sqrt, full, both"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_sections_fill_defaults() {
        let c: ExperimentConfig = toml::from_str("[sweep]\nrho = 0.25\n").unwrap();
        assert_eq!(c.sweep.rho, 0.25);
        assert_eq!(c.field, FieldConfig::default());
    }

    #[test]
    fn beta_out_of_range_names_key() {
        let mut c = ExperimentConfig::default();
        c.sweep.beta = 1.5;
        let err = c.validate().unwrap_err();
        assert!(err.message.contains("sweep.beta") && err.message.contains("[0,1]"));
    }
}

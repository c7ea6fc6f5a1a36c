//! TOML run configuration.
//!
//! A config file groups the knobs for each pipeline into sections. Every
//! section and nearly every key is optional; command-line flags override
//! file values, and file values override the defaults baked into the core
//! types. Unknown keys are rejected so typos surface as validation errors
//! instead of silently falling back to defaults.
//!
//! ```toml
//! [csl]
//! coupling = "non_mass_proportional"
//! correlation_length_m = 1e-7
//!
//! [exposure]
//! detector_mass_kg = 2.0
//! live_time_days = 80.0
//!
//! [fit]
//! range_lo_kev = 4.5
//! range_hi_kev = 48.5
//! confidence_level = 0.90
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;

use limitkit_core::collapse::{
    Coupling, CslParams, ExposureConfig, DEFAULT_CHARGE_SQ_OVER_4PI, DEFAULT_CORRELATION_LENGTH_M,
    DEFAULT_EMITTING_ELECTRONS_PER_ATOM, GERMANIUM_ATOMIC_MASS_G_PER_MOL,
    GERMANIUM_ATOMIC_NUMBER,
};
use limitkit_core::constants::REFERENCE_FWHM_KEV;
use limitkit_core::fit::DEFAULT_CONFIDENCE_LEVEL;
use limitkit_core::pep::{RsConfig, DEFAULT_CAPTURE_FRACTION, DEFAULT_N_SIGMA};
use limitkit_core::sim::{Continuum, Line, SimConfig};
use limitkit_core::spectrum::ExposureRef;

use crate::error::CliError;

pub const DEFAULT_RANGE_LO_KEV: f64 = 4.5;
pub const DEFAULT_RANGE_HI_KEV: f64 = 48.5;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub csl: CslSection,
    #[serde(default)]
    pub exposure: ExposureSection,
    #[serde(default)]
    pub fit: FitSection,
    pub pep: Option<PepSection>,
    pub simulate: Option<SimSection>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CslSection {
    /// Collapse rate in 1/s, used by `simulate` and `convert` as an input
    /// value. The fit does not need it.
    pub lambda: Option<f64>,
    pub correlation_length_m: f64,
    pub coupling: Option<Coupling>,
    pub charge_sq_over_4pi: f64,
    pub relax_validity_window: bool,
}

impl Default for CslSection {
    fn default() -> Self {
        Self {
            lambda: None,
            correlation_length_m: DEFAULT_CORRELATION_LENGTH_M,
            coupling: None,
            charge_sq_over_4pi: DEFAULT_CHARGE_SQ_OVER_4PI,
            relax_validity_window: false,
        }
    }
}

impl CslSection {
    /// Builds parameter sets for the requested coupling with a placeholder
    /// rate of 1/s when none is configured (the fit pipeline only uses the
    /// geometry fields).
    pub fn to_params(&self, coupling: Coupling) -> Result<CslParams, CliError> {
        let params = CslParams {
            lambda_rate: self.lambda.unwrap_or(1.0),
            correlation_length_m: self.correlation_length_m,
            coupling,
            charge_sq_over_4pi: self.charge_sq_over_4pi,
            relax_validity_window: self.relax_validity_window,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExposureSection {
    pub detector_mass_kg: Option<f64>,
    pub live_time_days: Option<f64>,
    pub atomic_mass_g_per_mol: f64,
    pub atomic_number: u32,
    pub emitting_electrons_per_atom: u32,
}

impl Default for ExposureSection {
    fn default() -> Self {
        Self {
            detector_mass_kg: None,
            live_time_days: None,
            atomic_mass_g_per_mol: GERMANIUM_ATOMIC_MASS_G_PER_MOL,
            atomic_number: GERMANIUM_ATOMIC_NUMBER,
            emitting_electrons_per_atom: DEFAULT_EMITTING_ELECTRONS_PER_ATOM,
        }
    }
}

impl ExposureSection {
    /// Resolves the full exposure, falling back to spectrum metadata for the
    /// mass and live time. Config values win over file metadata.
    pub fn resolve(&self, metadata: ExposureRef) -> Result<ExposureConfig, CliError> {
        let detector_mass_kg = self
            .detector_mass_kg
            .or(metadata.detector_mass_kg)
            .ok_or_else(|| {
                CliError::validation(
                    "detector mass is not known: set [exposure] detector_mass_kg in the \
                     config or a `# mass_kg=` metadata line in the spectrum file",
                )
            })?;
        let live_time_days = self
            .live_time_days
            .or(metadata.live_time_days)
            .ok_or_else(|| {
                CliError::validation(
                    "live time is not known: set [exposure] live_time_days in the config \
                     or a `# live_time_days=` metadata line in the spectrum file",
                )
            })?;
        let exposure = ExposureConfig {
            detector_mass_kg,
            atomic_mass_g_per_mol: self.atomic_mass_g_per_mol,
            atomic_number: self.atomic_number,
            emitting_electrons_per_atom: self.emitting_electrons_per_atom,
            live_time_days,
        };
        exposure.validate()?;
        Ok(exposure)
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub range_lo_kev: f64,
    pub range_hi_kev: f64,
    pub confidence_level: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            range_lo_kev: DEFAULT_RANGE_LO_KEV,
            range_hi_kev: DEFAULT_RANGE_HI_KEV,
            confidence_level: DEFAULT_CONFIDENCE_LEVEL,
        }
    }
}

/// Ramberg-Snow counting setup. Mirrors `RsConfig` with defaults for the
/// fraction-type knobs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PepSection {
    pub current_amp: f64,
    pub time_on_s: f64,
    pub time_off_s: f64,
    pub strip_length_m: f64,
    pub mean_free_path_m: f64,
    #[serde(default = "default_capture_fraction")]
    pub capture_fraction: f64,
    pub detection_efficiency: f64,
    pub geometric_acceptance: f64,
    pub roi_center_kev: f64,
    pub roi_half_width_kev: f64,
    #[serde(default = "default_n_sigma")]
    pub n_sigma: f64,
}

fn default_capture_fraction() -> f64 {
    DEFAULT_CAPTURE_FRACTION
}

fn default_n_sigma() -> f64 {
    DEFAULT_N_SIGMA
}

impl PepSection {
    pub fn to_rs_config(&self) -> Result<RsConfig, CliError> {
        let cfg = RsConfig {
            current_amp: self.current_amp,
            time_on_s: self.time_on_s,
            time_off_s: self.time_off_s,
            strip_length_m: self.strip_length_m,
            mean_free_path_m: self.mean_free_path_m,
            capture_fraction: self.capture_fraction,
            detection_efficiency: self.detection_efficiency,
            geometric_acceptance: self.geometric_acceptance,
            roi_center_kev: self.roi_center_kev,
            roi_half_width_kev: self.roi_half_width_kev,
        };
        cfg.validate()?;
        if !(self.n_sigma.is_finite() && self.n_sigma > 0.0) {
            return Err(CliError::validation(format!(
                "[pep] n_sigma must be positive, got {}",
                self.n_sigma
            )));
        }
        Ok(cfg)
    }
}

/// Spectrum generator setup. Mirrors `SimConfig` with defaults suited to a
/// copper-fluorescence test scene.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_sim_e_min")]
    pub e_min_kev: f64,
    #[serde(default = "default_sim_e_max")]
    pub e_max_kev: f64,
    #[serde(default = "default_sim_bin_width")]
    pub bin_width_kev: f64,
    #[serde(default)]
    pub lines: Vec<Line>,
    #[serde(default = "default_sim_fwhm")]
    pub resolution_fwhm_kev: f64,
    pub continuum: Continuum,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub poisson: bool,
}

fn default_sim_e_min() -> f64 {
    4.0
}

fn default_sim_e_max() -> f64 {
    12.0
}

fn default_sim_bin_width() -> f64 {
    0.05
}

fn default_sim_fwhm() -> f64 {
    REFERENCE_FWHM_KEV
}

fn default_true() -> bool {
    true
}

impl SimSection {
    pub fn to_sim_config(&self, seed_override: Option<u64>) -> Result<SimConfig, CliError> {
        let cfg = SimConfig {
            e_min_kev: self.e_min_kev,
            e_max_kev: self.e_max_kev,
            bin_width_kev: self.bin_width_kev,
            lines: self.lines.clone(),
            resolution_fwhm_kev: self.resolution_fwhm_kev,
            continuum: self.continuum,
            seed: seed_override.unwrap_or(self.seed),
            poisson: self.poisson,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }

    /// Loads the file when a path is given, otherwise returns defaults.
    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate_fit_section(&self) -> Result<(), CliError> {
        let fit = &self.fit;
        if !(fit.range_lo_kev.is_finite()
            && fit.range_hi_kev.is_finite()
            && fit.range_lo_kev < fit.range_hi_kev)
        {
            return Err(CliError::validation(format!(
                "[fit] range [{}, {}] keV is not a valid interval",
                fit.range_lo_kev, fit.range_hi_kev
            )));
        }
        if !(fit.confidence_level.is_finite()
            && fit.confidence_level > 0.5
            && fit.confidence_level < 1.0)
        {
            return Err(CliError::validation(format!(
                "[fit] confidence_level must lie in (0.5, 1), got {}",
                fit.confidence_level
            )));
        }
        Ok(())
    }
}

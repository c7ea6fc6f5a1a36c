//! Result records written by the CLI.
//!
//! Every command emits one JSON document, pretty-printed with a trailing
//! newline. Serialization order follows struct declaration order, so a rerun
//! with the same inputs produces byte-identical output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use limitkit_core::collapse::{Coupling, ExposureConfig};
use limitkit_core::fit::{model_bin_integral, FitResult};
use limitkit_core::pep::{PepLimit, SignalBound};
use limitkit_core::spectrum::{BinnedSpectrum, RoiCounts, SpectrumUnit};

use crate::error::CliError;

/// One inferred collapse-rate bound.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaRecord {
    #[serde(rename = "lambda_limit_s^-1")]
    pub lambda_limit: f64,
    pub coupling: Coupling,
    pub confidence_level: f64,
    pub alpha_upper: f64,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub command: &'static str,
    pub input: String,
    pub label: String,
    pub unit: SpectrumUnit,
    pub range_kev: [f64; 2],
    pub bins_used: usize,
    pub fit: FitSummary,
    pub lambda_limits: Vec<LambdaRecord>,
    pub exposure: ExposureConfig,
    pub warnings: Vec<String>,
}

/// Fit block of the JSON report. Mirrors `FitResult` with the upper limit
/// fields flattened out of their Options.
#[derive(Debug, Serialize)]
pub struct FitSummary {
    pub alpha_hat: f64,
    pub sigma_alpha: f64,
    pub chi2: f64,
    pub ndf: usize,
    pub reduced_chi2: f64,
    pub alpha_upper: Option<f64>,
    pub confidence_level: Option<f64>,
}

impl FitSummary {
    pub fn from_result(r: &FitResult) -> Self {
        Self {
            alpha_hat: r.alpha_hat,
            sigma_alpha: r.sigma_alpha,
            chi2: r.chi2,
            ndf: r.ndf,
            reduced_chi2: r.reduced_chi2(),
            alpha_upper: r.alpha_upper,
            confidence_level: r.confidence_level,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PepReport {
    pub command: &'static str,
    pub on_input: String,
    pub off_input: String,
    pub roi_center_kev: f64,
    pub roi_half_width_kev: f64,
    pub on_roi: RoiSummary,
    pub off_roi: RoiSummary,
    pub live_time_ratio: f64,
    pub signal: SignalSummary,
    /// True when the raw on-off difference is positive; a positive excess is
    /// worth a second look even when it stays below the quoted bound.
    pub positive_excess: bool,
    pub limit: PepLimit,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RoiSummary {
    pub counts: f64,
    pub sigma: f64,
}

impl From<RoiCounts> for RoiSummary {
    fn from(r: RoiCounts) -> Self {
        Self {
            counts: r.counts,
            sigma: r.sigma,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SignalSummary {
    pub delta_counts: f64,
    pub sigma_delta: f64,
    pub upper_counts: f64,
    pub n_sigma: f64,
}

impl From<SignalBound> for SignalSummary {
    fn from(b: SignalBound) -> Self {
        Self {
            delta_counts: b.delta_counts,
            sigma_delta: b.sigma_delta,
            upper_counts: b.upper_counts,
            n_sigma: b.n_sigma,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub command: &'static str,
    pub output: String,
    pub bins: usize,
    pub total_counts: f64,
    pub seed: u64,
    pub poisson: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ConvertReport {
    pub command: &'static str,
    pub direction: &'static str,
    pub coupling: Coupling,
    pub unit: SpectrumUnit,
    pub input_value: f64,
    pub output_value: f64,
}

/// Renders a report as the canonical output document.
pub fn render_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes the document to `path`, or to stdout when no path is given.
pub fn emit_json<T: Serialize>(report: &T, path: Option<&Path>) -> Result<(), CliError> {
    let doc = render_json(report);
    match path {
        Some(p) => fs::write(p, doc)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

/// Residuals CSV path derived from the JSON output path: `x.json` becomes
/// `x.residuals.csv`.
pub fn residuals_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| String::from("fit"));
    output.with_file_name(format!("{stem}.residuals.csv"))
}

/// Writes per-bin data/model/pull rows for the fitted range.
pub fn write_residuals(
    path: &Path,
    spectrum: &BinnedSpectrum,
    alpha_hat: f64,
) -> Result<(), CliError> {
    let mut out = String::from("e_center_kev,data_counts,model_counts,residual_over_sigma\n");
    for bin in spectrum.bins() {
        let model = model_bin_integral(alpha_hat, bin.e_low_kev, bin.e_high_kev)
            .map_err(CliError::from)?;
        let pull = (bin.counts - model) / bin.sigma;
        let _ = writeln!(out, "{},{},{},{}", bin.center_kev(), bin.counts, model, pull);
    }
    fs::write(path, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_record_uses_the_published_key() {
        let rec = LambdaRecord {
            lambda_limit: 1.4e-17,
            coupling: Coupling::NonMassProportional,
            confidence_level: 0.90,
            alpha_upper: 70.0,
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"lambda_limit_s^-1\":1.4e-17"), "{json}");
        assert!(json.contains("\"non_mass_proportional\""), "{json}");
    }

    #[test]
    fn residuals_path_replaces_the_extension() {
        assert_eq!(
            residuals_path(Path::new("/tmp/out/fit.json")),
            PathBuf::from("/tmp/out/fit.residuals.csv")
        );
        assert_eq!(
            residuals_path(Path::new("result")),
            PathBuf::from("result.residuals.csv")
        );
    }

    #[test]
    fn render_is_pretty_with_trailing_newline() {
        let rec = ConvertReport {
            command: "convert",
            direction: "lambda_to_alpha",
            coupling: Coupling::MassProportional,
            unit: SpectrumUnit::Counts,
            input_value: 1e-16,
            output_value: 2.0,
        };
        let doc = render_json(&rec);
        assert!(doc.ends_with("}\n"), "{doc:?}");
        assert!(doc.contains("\n  \"direction\": \"lambda_to_alpha\""), "{doc}");
    }
}

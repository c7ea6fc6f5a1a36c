//! CSV spectrum files.
//!
//! The format is a plain comma-separated table with optional metadata lines
//! before the header:
//!
//! ```text
//! # unit=counts
//! # mass_kg=2.0
//! # live_time_days=80.0
//! # label=igex_2002
//! e_low_kev,e_high_kev,counts,sigma
//! 4.5,5.5,110,10.488088481701515
//! ```
//!
//! The `sigma` column is optional on load; when absent each bin gets the
//! Poisson width sqrt(counts) (1.0 for empty bins). Parsing is done by hand
//! rather than through a csv crate so that every parse or validation error
//! can cite the exact 1-based line number in the file. Floats are written
//! with Rust's shortest round-trip formatting, so a save/load cycle
//! reproduces every field bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use limitkit_core::spectrum::{poisson_sigma, Bin, BinnedSpectrum, ExposureRef, SpectrumUnit};

use crate::error::CliError;

const HEADER_BARE: [&str; 3] = ["e_low_kev", "e_high_kev", "counts"];
const HEADER_SIGMA: [&str; 4] = ["e_low_kev", "e_high_kev", "counts", "sigma"];

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> CliError {
    CliError::validation(format!("{}:{}: {}", path.display(), line, msg.into()))
}

fn parse_float(path: &Path, line: usize, field: &str, raw: &str) -> Result<f64, CliError> {
    let trimmed = raw.trim();
    trimmed
        .parse::<f64>()
        .map_err(|_| parse_error(path, line, format!("{field} is not a number: {trimmed:?}")))
}

/// Loads a binned spectrum from a CSV file.
///
/// Missing files map to the I/O error class; anything wrong with the
/// contents maps to validation, with the offending line number in the
/// message.
pub fn load_spectrum(path: &Path) -> Result<BinnedSpectrum, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;

    let mut unit = SpectrumUnit::Counts;
    let mut label = String::new();
    let mut exposure = ExposureRef::default();
    let mut has_sigma: Option<bool> = None;
    let mut bins: Vec<Bin> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }

        if let Some(meta) = line.strip_prefix('#') {
            if has_sigma.is_some() {
                return Err(parse_error(
                    path,
                    line_no,
                    "metadata lines must appear before the header",
                ));
            }
            let meta = meta.trim();
            let Some((key, value)) = meta.split_once('=') else {
                return Err(parse_error(
                    path,
                    line_no,
                    format!("metadata line is not key=value: {meta:?}"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "unit" => {
                    unit = value.parse().map_err(|_| {
                        parse_error(path, line_no, format!("unknown unit {value:?}"))
                    })?;
                }
                "label" => label = value.to_owned(),
                "mass_kg" => {
                    exposure.detector_mass_kg =
                        Some(parse_float(path, line_no, "mass_kg", value)?);
                }
                "live_time_days" => {
                    exposure.live_time_days =
                        Some(parse_float(path, line_no, "live_time_days", value)?);
                }
                other => {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("unknown metadata key {other:?}"),
                    ));
                }
            }
            continue;
        }

        let fields: Vec<&str> = line.split(',').map(str::trim).collect();

        let Some(with_sigma) = has_sigma else {
            // First non-metadata line must be the header.
            if fields == HEADER_BARE {
                has_sigma = Some(false);
            } else if fields == HEADER_SIGMA {
                has_sigma = Some(true);
            } else {
                return Err(parse_error(
                    path,
                    line_no,
                    format!(
                        "expected header \"{}\" or \"{}\", found {:?}",
                        HEADER_BARE.join(","),
                        HEADER_SIGMA.join(","),
                        line
                    ),
                ));
            }
            continue;
        };

        let expected = if with_sigma { 4 } else { 3 };
        if fields.len() != expected {
            return Err(parse_error(
                path,
                line_no,
                format!("expected {expected} fields, found {}", fields.len()),
            ));
        }

        let e_low_kev = parse_float(path, line_no, "e_low_kev", fields[0])?;
        let e_high_kev = parse_float(path, line_no, "e_high_kev", fields[1])?;
        let counts = parse_float(path, line_no, "counts", fields[2])?;
        if !(e_low_kev.is_finite() && e_high_kev.is_finite() && counts.is_finite()) {
            return Err(parse_error(path, line_no, "non-finite value"));
        }
        if e_low_kev >= e_high_kev {
            return Err(parse_error(
                path,
                line_no,
                format!("e_low_kev {e_low_kev} must be below e_high_kev {e_high_kev}"),
            ));
        }
        if counts < 0.0 {
            return Err(parse_error(
                path,
                line_no,
                format!("negative counts {counts}"),
            ));
        }
        let sigma = if with_sigma {
            let s = parse_float(path, line_no, "sigma", fields[3])?;
            if !s.is_finite() || s < 0.0 {
                return Err(parse_error(path, line_no, format!("bad sigma {s}")));
            }
            s
        } else {
            poisson_sigma(counts)
        };

        if let Some(prev) = bins.last() {
            if e_low_kev < prev.e_high_kev {
                return Err(parse_error(
                    path,
                    line_no,
                    format!(
                        "bins are not in ascending order: e_low_kev {e_low_kev} \
                         overlaps previous e_high_kev {}",
                        prev.e_high_kev
                    ),
                ));
            }
        }

        bins.push(Bin {
            e_low_kev,
            e_high_kev,
            counts,
            sigma,
        });
    }

    if has_sigma.is_none() {
        return Err(CliError::validation(format!(
            "{}: no header line found",
            path.display()
        )));
    }
    if bins.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no data rows after the header",
            path.display()
        )));
    }

    BinnedSpectrum::new(bins, unit, exposure, label)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Writes a spectrum as CSV. Always includes the `sigma` column and every
/// metadata field the spectrum carries, so a load of the written file
/// reconstructs the input exactly.
pub fn save_spectrum(path: &Path, spectrum: &BinnedSpectrum) -> Result<(), CliError> {
    let mut out = String::new();
    let _ = writeln!(out, "# unit={}", spectrum.unit());
    if !spectrum.label().is_empty() {
        let _ = writeln!(out, "# label={}", spectrum.label());
    }
    let exposure = spectrum.exposure();
    if let Some(mass) = exposure.detector_mass_kg {
        let _ = writeln!(out, "# mass_kg={mass}");
    }
    if let Some(days) = exposure.live_time_days {
        let _ = writeln!(out, "# live_time_days={days}");
    }
    let _ = writeln!(out, "{}", HEADER_SIGMA.join(","));
    for bin in spectrum.bins() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            bin.e_low_kev, bin.e_high_kev, bin.counts, bin.sigma
        );
    }
    fs::write(path, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

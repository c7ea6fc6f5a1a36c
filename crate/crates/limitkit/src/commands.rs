//! Command implementations behind the CLI.
//!
//! Each command reads its inputs, runs the core pipeline, and emits exactly
//! one JSON document (plus data CSVs where noted). Nothing here depends on
//! wall-clock time or environment, so reruns with the same inputs are
//! byte-identical.

use std::collections::BTreeMap;

use serde::Serialize;

use limitkit_core::collapse::{
    alpha_from_lambda, lambda_from_alpha, Coupling, NON_RELATIVISTIC_BOUND_KEV,
};
use limitkit_core::constants::PhysicalConstants;
use limitkit_core::fit::fit_with_upper_limit;
use limitkit_core::pep::{beta2_limit, signal_upper_limit};
use limitkit_core::sim::{expected_spectrum, sample_spectrum};
use limitkit_core::spectrum::{ExposureRef, SpectrumUnit};

use crate::cli::{
    Cli, Command, ConstantsArgs, ConvertArgs, CouplingArg, FitCollapseArgs, PepLimitArgs,
    SimulateArgs,
};
use crate::config::FileConfig;
use crate::csvio::{load_spectrum, save_spectrum};
use crate::error::CliError;
use crate::report::{
    emit_json, residuals_path, write_residuals, ConvertReport, FitReport, FitSummary,
    LambdaRecord, PepReport, SimulateReport,
};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::FitCollapse(args) => cmd_fit_collapse(args),
        Command::PepLimit(args) => cmd_pep_limit(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Constants(args) => cmd_constants(args),
    }
}

pub fn cmd_fit_collapse(args: FitCollapseArgs) -> Result<(), CliError> {
    let mut cfg = FileConfig::load_optional(args.config.as_deref())?;
    if let Some(cl) = args.cl {
        cfg.fit.confidence_level = cl;
    }
    if let Some(range) = args.range {
        cfg.fit.range_lo_kev = range.lo_kev;
        cfg.fit.range_hi_kev = range.hi_kev;
    }
    cfg.validate_fit_section()?;

    let spectrum = load_spectrum(&args.input)?;
    let exposure = cfg.exposure.resolve(spectrum.exposure())?;
    let constants = PhysicalConstants::pinned();

    let mut warnings = Vec::new();
    if spectrum.unit() == SpectrumUnit::CountsPerKevKgDay {
        warnings.push(format!(
            "input is normalized (counts/keV/kg/day); rescaled to raw counts with \
             mass {} kg and live time {} days before fitting",
            exposure.detector_mass_kg, exposure.live_time_days
        ));
    }
    if cfg.fit.range_hi_kev > NON_RELATIVISTIC_BOUND_KEV && !cfg.csl.relax_validity_window {
        warnings.push(format!(
            "fit window ends at {} keV, beyond the {} keV validity bound of the \
             non-relativistic emission rate",
            cfg.fit.range_hi_kev, NON_RELATIVISTIC_BOUND_KEV
        ));
    }

    let raw = spectrum.to_raw_counts(exposure.detector_mass_kg, exposure.live_time_days)?;
    let windowed = raw.select_range(cfg.fit.range_lo_kev, cfg.fit.range_hi_kev)?;
    let fit = fit_with_upper_limit(&windowed, cfg.fit.confidence_level)?;
    let alpha_upper = fit.alpha_upper.expect("upper limit requested");

    // The fit ran on raw counts, so the amplitude-to-rate conversion always
    // uses the counts convention regardless of the input file's unit.
    let mut lambda_limits = Vec::new();
    for &coupling in args.coupling.couplings() {
        let params = cfg.csl.to_params(coupling)?;
        let lambda = lambda_from_alpha(
            alpha_upper,
            &params,
            &exposure,
            SpectrumUnit::Counts,
            &constants,
        )?;
        lambda_limits.push(LambdaRecord {
            lambda_limit: lambda,
            coupling,
            confidence_level: cfg.fit.confidence_level,
            alpha_upper,
        });
    }

    let report = FitReport {
        command: "fit-collapse",
        input: args.input.display().to_string(),
        label: spectrum.label().to_owned(),
        unit: spectrum.unit(),
        range_kev: [cfg.fit.range_lo_kev, cfg.fit.range_hi_kev],
        bins_used: windowed.bins().len(),
        fit: FitSummary::from_result(&fit),
        lambda_limits,
        exposure,
        warnings,
    };
    emit_json(&report, Some(&args.output))?;
    write_residuals(&residuals_path(&args.output), &windowed, fit.alpha_hat)
}

pub fn cmd_pep_limit(args: PepLimitArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(&args.config)?;
    let Some(pep) = cfg.pep.as_ref() else {
        return Err(CliError::validation(format!(
            "{}: pep-limit needs a [pep] section",
            args.config.display()
        )));
    };
    let rs = pep.to_rs_config()?;
    let constants = PhysicalConstants::pinned();

    let on = load_spectrum(&args.on)?;
    let off = load_spectrum(&args.off)?;
    for (name, spec) in [("on", &on), ("off", &off)] {
        if spec.unit() != SpectrumUnit::Counts {
            return Err(CliError::validation(format!(
                "{name} spectrum is in {}; the counting analysis needs raw counts",
                spec.unit()
            )));
        }
    }

    let on_roi = on.counts_in_roi(rs.roi_center_kev, rs.roi_half_width_kev)?;
    let off_roi = off.counts_in_roi(rs.roi_center_kev, rs.roi_half_width_kev)?;
    let ratio = rs.live_time_ratio();
    let bound = signal_upper_limit(on_roi, off_roi, ratio, pep.n_sigma)?;
    let limit = beta2_limit(bound.upper_counts, pep.n_sigma, &rs, &constants)?;

    let mut warnings = Vec::new();
    if let Some(w) = rs.roi_warning() {
        warnings.push(w.to_string());
    }

    let report = PepReport {
        command: "pep-limit",
        on_input: args.on.display().to_string(),
        off_input: args.off.display().to_string(),
        roi_center_kev: rs.roi_center_kev,
        roi_half_width_kev: rs.roi_half_width_kev,
        on_roi: on_roi.into(),
        off_roi: off_roi.into(),
        live_time_ratio: ratio,
        signal: bound.into(),
        positive_excess: bound.delta_counts > 0.0,
        limit,
        warnings,
    };
    emit_json(&report, args.output.as_deref())
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(&args.config)?;
    let Some(sim) = cfg.simulate.as_ref() else {
        return Err(CliError::validation(format!(
            "{}: simulate needs a [simulate] section",
            args.config.display()
        )));
    };
    let sim_cfg = sim.to_sim_config(args.seed)?;
    let spectrum = if sim_cfg.poisson {
        sample_spectrum(&sim_cfg)?
    } else {
        expected_spectrum(&sim_cfg)?
    };
    save_spectrum(&args.output, &spectrum)?;

    let report = SimulateReport {
        command: "simulate",
        output: args.output.display().to_string(),
        bins: spectrum.bins().len(),
        total_counts: spectrum.bins().iter().map(|b| b.counts).sum(),
        seed: sim_cfg.seed,
        poisson: sim_cfg.poisson,
        warnings: sim_cfg.warnings().iter().map(|w| w.to_string()).collect(),
    };
    emit_json(&report, None)
}

pub fn cmd_convert(args: ConvertArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load_optional(args.config.as_deref())?;
    let coupling = match args.coupling {
        Some(CouplingArg::Both) => {
            return Err(CliError::validation(
                "convert maps a single value; pick --coupling nmp or mp",
            ));
        }
        Some(arg) => arg.single().expect("both handled above"),
        None => cfg.csl.coupling.unwrap_or(Coupling::NonMassProportional),
    };
    let exposure = cfg.exposure.resolve(ExposureRef::default())?;
    let constants = PhysicalConstants::pinned();
    let unit: SpectrumUnit = args.unit.into();

    let report = if let Some(lambda) = args.value.lambda {
        let mut params = cfg.csl.to_params(coupling)?;
        params.lambda_rate = lambda;
        params.validate()?;
        let alpha = alpha_from_lambda(&params, &exposure, unit, &constants)?;
        ConvertReport {
            command: "convert",
            direction: "lambda_to_alpha",
            coupling,
            unit,
            input_value: lambda,
            output_value: alpha,
        }
    } else {
        let alpha = args.value.alpha.expect("clap enforces one of the pair");
        let params = cfg.csl.to_params(coupling)?;
        let lambda = lambda_from_alpha(alpha, &params, &exposure, unit, &constants)?;
        ConvertReport {
            command: "convert",
            direction: "alpha_to_lambda",
            coupling,
            unit,
            input_value: alpha,
            output_value: lambda,
        }
    };
    emit_json(&report, args.output.as_deref())
}

#[derive(Debug, Serialize)]
struct ConstantEntry {
    value: f64,
    unit: &'static str,
}

pub fn cmd_constants(args: ConstantsArgs) -> Result<(), CliError> {
    let c = PhysicalConstants::pinned();
    let mut doc: BTreeMap<&'static str, ConstantEntry> = BTreeMap::new();
    doc.insert(
        "electron_mass_kev",
        ConstantEntry {
            value: c.electron_mass_kev,
            unit: "keV",
        },
    );
    doc.insert(
        "nucleon_mass_kev",
        ConstantEntry {
            value: c.nucleon_mass_kev,
            unit: "keV",
        },
    );
    doc.insert(
        "fine_structure",
        ConstantEntry {
            value: c.fine_structure,
            unit: "dimensionless",
        },
    );
    doc.insert(
        "hbar_c_kev_nm",
        ConstantEntry {
            value: c.hbar_c_kev_nm,
            unit: "keV nm",
        },
    );
    doc.insert(
        "elementary_charge_coulomb",
        ConstantEntry {
            value: c.elementary_charge_coulomb,
            unit: "C",
        },
    );
    doc.insert(
        "avogadro",
        ConstantEntry {
            value: c.avogadro,
            unit: "mol^-1",
        },
    );
    emit_json(&doc, args.output.as_deref())
}

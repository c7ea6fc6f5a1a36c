//! Command-line interface definition.
//!
//! Flag precedence: command-line flags override config-file values, which
//! override built-in defaults. Usage errors exit with code 2 (clap's
//! default); runtime failures use the classes in [`crate::error`].

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use limitkit_core::collapse::Coupling;
use limitkit_core::spectrum::SpectrumUnit;

#[derive(Debug, Parser)]
#[command(
    name = "limitkit",
    version,
    about = "Limit-setting toolkit: collapse-rate fits and PEP-violation bounds",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a 1/E model to a binned spectrum and infer collapse-rate limits.
    FitCollapse(FitCollapseArgs),
    /// Bound the PEP-violation probability from current-on/off spectra.
    PepLimit(PepLimitArgs),
    /// Generate a synthetic spectrum from a config file.
    Simulate(SimulateArgs),
    /// Convert between a collapse rate and a spectrum amplitude.
    Convert(ConvertArgs),
    /// Print the pinned physical constants as JSON.
    Constants(ConstantsArgs),
}

#[derive(Debug, Args)]
pub struct FitCollapseArgs {
    /// TOML run configuration.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Input spectrum CSV.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Output JSON path; a residuals CSV is written next to it.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Confidence level for the upper limit, in (0.5, 1).
    #[arg(long, value_name = "CL")]
    pub cl: Option<f64>,
    /// Couplings to report.
    #[arg(long, value_enum, default_value_t = CouplingArg::Both)]
    pub coupling: CouplingArg,
    /// Fit window as LO:HI in keV.
    #[arg(long, value_name = "LO:HI")]
    pub range: Option<RangeArg>,
}

#[derive(Debug, Args)]
pub struct PepLimitArgs {
    /// TOML run configuration; the [pep] section is required.
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Current-on spectrum CSV.
    #[arg(long, value_name = "FILE")]
    pub on: PathBuf,
    /// Current-off spectrum CSV.
    #[arg(long, value_name = "FILE")]
    pub off: PathBuf,
    /// Output JSON path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML run configuration; the [simulate] section is required.
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output spectrum CSV path.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Override the config seed.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ConvertValue {
    /// Collapse rate in 1/s, converted to a spectrum amplitude.
    #[arg(long, value_name = "RATE")]
    pub lambda: Option<f64>,
    /// Spectrum amplitude, converted to a collapse rate.
    #[arg(long, value_name = "ALPHA")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// TOML run configuration supplying the exposure.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub value: ConvertValue,
    /// Coupling for the conversion (both is not meaningful here).
    #[arg(long, value_enum)]
    pub coupling: Option<CouplingArg>,
    /// Amplitude normalization convention.
    #[arg(long, value_enum, default_value_t = UnitArg::Counts)]
    pub unit: UnitArg,
    /// Output JSON path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Output JSON path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingArg {
    /// Non-mass-proportional coupling.
    Nmp,
    /// Mass-proportional coupling.
    Mp,
    /// Report both couplings.
    Both,
}

impl CouplingArg {
    /// Couplings to iterate, in a fixed report order.
    pub fn couplings(self) -> &'static [Coupling] {
        match self {
            CouplingArg::Nmp => &[Coupling::NonMassProportional],
            CouplingArg::Mp => &[Coupling::MassProportional],
            CouplingArg::Both => &[Coupling::NonMassProportional, Coupling::MassProportional],
        }
    }

    pub fn single(self) -> Option<Coupling> {
        match self {
            CouplingArg::Nmp => Some(Coupling::NonMassProportional),
            CouplingArg::Mp => Some(Coupling::MassProportional),
            CouplingArg::Both => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    #[value(name = "counts")]
    Counts,
    #[value(name = "counts_per_kev_kg_day")]
    CountsPerKevKgDay,
}

impl From<UnitArg> for SpectrumUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Counts => SpectrumUnit::Counts,
            UnitArg::CountsPerKevKgDay => SpectrumUnit::CountsPerKevKgDay,
        }
    }
}

/// `LO:HI` energy window in keV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg {
    pub lo_kev: f64,
    pub hi_kev: f64,
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let lo_kev: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("range start is not a number: {lo:?}"))?;
        let hi_kev: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("range end is not a number: {hi:?}"))?;
        if !(lo_kev.is_finite() && hi_kev.is_finite() && lo_kev < hi_kev) {
            return Err(format!("range {lo_kev}:{hi_kev} is not an increasing interval"));
        }
        Ok(RangeArg { lo_kev, hi_kev })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_cli() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn range_parses_and_rejects() {
        let r: RangeArg = "4.5:48.5".parse().unwrap();
        assert_eq!(r.lo_kev, 4.5);
        assert_eq!(r.hi_kev, 48.5);
        assert!("48.5:4.5".parse::<RangeArg>().is_err());
        assert!("4.5".parse::<RangeArg>().is_err());
        assert!("a:b".parse::<RangeArg>().is_err());
    }

    #[test]
    fn subcommand_names_are_kebab_case() {
        let cli = Cli::try_parse_from([
            "limitkit",
            "fit-collapse",
            "--input",
            "in.csv",
            "--output",
            "out.json",
        ])
        .unwrap();
        match cli.command {
            Command::FitCollapse(args) => {
                assert_eq!(args.coupling, CouplingArg::Both);
                assert!(args.range.is_none());
            }
            other => panic!("wrong command {other:?}"),
        }
    }

    #[test]
    fn convert_requires_exactly_one_value() {
        assert!(Cli::try_parse_from(["limitkit", "convert"]).is_err());
        assert!(Cli::try_parse_from([
            "limitkit", "convert", "--lambda", "1e-16", "--alpha", "2.0"
        ])
        .is_err());
        let cli =
            Cli::try_parse_from(["limitkit", "convert", "--lambda", "0.0"]).unwrap();
        match cli.command {
            Command::Convert(args) => {
                assert_eq!(args.value.lambda, Some(0.0));
                assert_eq!(args.unit, UnitArg::Counts);
            }
            other => panic!("wrong command {other:?}"),
        }
    }
}

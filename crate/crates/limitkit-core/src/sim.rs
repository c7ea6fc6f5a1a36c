//! Seedable synthetic spectra: Gaussian fluorescence lines on a flat or 1/E
//! continuum, with optional Poisson sampling.
//!
//! The generator is the oracle source for fit-recovery and ROI tests, so
//! determinism is part of the contract: a pinned algorithm (ChaCha8) with
//! explicit 64-bit seeding makes identical (seed, config) pairs produce
//! bit-identical spectra on every platform.

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::constants::{
    fwhm_to_sigma, CU_K_ALPHA_FORBIDDEN_KEV, CU_K_ALPHA_KEV, CU_K_BETA_KEV, REFERENCE_FWHM_KEV,
};
use crate::math::gaussian_bin_integral;
use crate::spectrum::{poisson_sigma, Bin, BinnedSpectrum, ExposureRef, SpectrumUnit};

/// Line tails are cut at this many sigmas; the discarded mass is below
/// 1e-15 of the line intensity.
pub const LINE_TRUNCATION_SIGMAS: f64 = 8.0;

/// Relative tolerance for the binning to tile [e_min, e_max] exactly.
const SPAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SimError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("binning range is empty: e_min {e_min_kev} must be < e_max {e_max_kev}")]
    BadRange { e_min_kev: f64, e_max_kev: f64 },
    #[error("bin width {bin_width_kev} does not tile [{e_min_kev}, {e_max_kev}] into a whole number of bins")]
    NotDivisible {
        e_min_kev: f64,
        e_max_kev: f64,
        bin_width_kev: f64,
    },
    #[error("line {index}: intensity must be finite and non-negative, got {intensity}")]
    BadIntensity { index: usize, intensity: f64 },
    #[error("flat continuum level must be finite and non-negative, got {level}")]
    BadLevel { level: f64 },
    #[error("1/E continuum amplitude must be finite and non-negative, got {alpha}")]
    BadAlpha { alpha: f64 },
    #[error("1/E continuum requires e_min > 0, got {e_min_kev}")]
    OneOverEFromZero { e_min_kev: f64 },
    #[error("sample_spectrum requires the poisson flag; use expected_spectrum for the noiseless expectation")]
    PoissonFlagNotSet,
}

/// A fluorescence line: Gaussian of the configured detector resolution,
/// total expected counts = intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Line {
    pub center_kev: f64,
    pub intensity_counts: f64,
}

/// Continuum under the lines.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Continuum {
    /// Constant level in counts per keV.
    Flat { level_per_kev: f64 },
    /// `alpha / E` shape; bin content `alpha * ln(e_high/e_low)`.
    OneOverE { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub e_min_kev: f64,
    pub e_max_kev: f64,
    pub bin_width_kev: f64,
    pub lines: Vec<Line>,
    pub resolution_fwhm_kev: f64,
    pub continuum: Continuum,
    pub seed: u64,
    pub poisson: bool,
}

/// Non-fatal generation findings.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SimWarning {
    #[error("line {index} at {center_kev} keV lies outside the generated range [{e_min_kev}, {e_max_kev}] keV")]
    LineOutsideRange {
        index: usize,
        center_kev: f64,
        e_min_kev: f64,
        e_max_kev: f64,
    },
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.bin_width_kev > 0.0) || !self.bin_width_kev.is_finite() {
            return Err(SimError::NonPositive {
                name: "bin_width_kev",
                value: self.bin_width_kev,
            });
        }
        if !(self.resolution_fwhm_kev > 0.0) || !self.resolution_fwhm_kev.is_finite() {
            return Err(SimError::NonPositive {
                name: "resolution_fwhm_kev",
                value: self.resolution_fwhm_kev,
            });
        }
        if !(self.e_min_kev < self.e_max_kev)
            || !self.e_min_kev.is_finite()
            || !self.e_max_kev.is_finite()
        {
            return Err(SimError::BadRange {
                e_min_kev: self.e_min_kev,
                e_max_kev: self.e_max_kev,
            });
        }
        self.bin_count()?;
        for (index, line) in self.lines.iter().enumerate() {
            if !(line.intensity_counts >= 0.0)
                || !line.intensity_counts.is_finite()
                || !line.center_kev.is_finite()
            {
                return Err(SimError::BadIntensity {
                    index,
                    intensity: line.intensity_counts,
                });
            }
        }
        match self.continuum {
            Continuum::Flat { level_per_kev } => {
                if !(level_per_kev >= 0.0) || !level_per_kev.is_finite() {
                    return Err(SimError::BadLevel {
                        level: level_per_kev,
                    });
                }
            }
            Continuum::OneOverE { alpha } => {
                if !(alpha >= 0.0) || !alpha.is_finite() {
                    return Err(SimError::BadAlpha { alpha });
                }
                if !(self.e_min_kev > 0.0) {
                    return Err(SimError::OneOverEFromZero {
                        e_min_kev: self.e_min_kev,
                    });
                }
            }
        }
        Ok(())
    }

    fn bin_count(&self) -> Result<usize, SimError> {
        let span = self.e_max_kev - self.e_min_kev;
        let n = libm::round(span / self.bin_width_kev);
        if n < 1.0 || (n * self.bin_width_kev - span).abs() > SPAN_TOLERANCE * span {
            return Err(SimError::NotDivisible {
                e_min_kev: self.e_min_kev,
                e_max_kev: self.e_max_kev,
                bin_width_kev: self.bin_width_kev,
            });
        }
        Ok(n as usize)
    }

    /// Lines that will not land in the generated range. Generation
    /// proceeds regardless; these are advisory.
    pub fn warnings(&self) -> Vec<SimWarning> {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, line)| {
                line.center_kev < self.e_min_kev || line.center_kev > self.e_max_kev
            })
            .map(|(index, line)| SimWarning::LineOutsideRange {
                index,
                center_kev: line.center_kev,
                e_min_kev: self.e_min_kev,
                e_max_kev: self.e_max_kev,
            })
            .collect()
    }
}

/// Noiseless expectation: each bin holds the integral of all lines (CDF
/// difference, tails cut at [`LINE_TRUNCATION_SIGMAS`]) plus the continuum.
/// Sigmas follow the declared-Poisson convention sqrt(mean), 1 for empty.
pub fn expected_spectrum(cfg: &SimConfig) -> Result<BinnedSpectrum, SimError> {
    cfg.validate()?;
    let n = cfg.bin_count()?;
    let sigma = fwhm_to_sigma(cfg.resolution_fwhm_kev).expect("validated above");
    let mut bins = Vec::with_capacity(n);
    for i in 0..n {
        let e_low = cfg.e_min_kev + i as f64 * cfg.bin_width_kev;
        let e_high = cfg.e_min_kev + (i + 1) as f64 * cfg.bin_width_kev;
        let mut mean = match cfg.continuum {
            Continuum::Flat { level_per_kev } => level_per_kev * (e_high - e_low),
            Continuum::OneOverE { alpha } => alpha * libm::log(e_high / e_low),
        };
        for line in &cfg.lines {
            let cut = LINE_TRUNCATION_SIGMAS * sigma;
            let lo = if e_low > line.center_kev - cut {
                e_low
            } else {
                line.center_kev - cut
            };
            let hi = if e_high < line.center_kev + cut {
                e_high
            } else {
                line.center_kev + cut
            };
            if lo < hi {
                mean += line.intensity_counts
                    * gaussian_bin_integral(line.center_kev, sigma, lo, hi);
            }
        }
        bins.push(Bin {
            e_low_kev: e_low,
            e_high_kev: e_high,
            counts: mean,
            sigma: poisson_sigma(mean),
        });
    }
    BinnedSpectrum::new(
        bins,
        SpectrumUnit::Counts,
        ExposureRef::default(),
        String::from("simulated"),
    )
    .map_err(|_| SimError::BadRange {
        e_min_kev: cfg.e_min_kev,
        e_max_kev: cfg.e_max_kev,
    })
}

/// Poisson draw around [`expected_spectrum`]: per-bin counts ~
/// Poisson(mean), sigma = sqrt(counts) (1 for empty bins). Identical
/// (seed, config) gives bit-identical output.
pub fn sample_spectrum(cfg: &SimConfig) -> Result<BinnedSpectrum, SimError> {
    if !cfg.poisson {
        return Err(SimError::PoissonFlagNotSet);
    }
    let expected = expected_spectrum(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bins: Vec<Bin> = expected
        .bins()
        .iter()
        .map(|b| {
            let counts = if b.counts > 0.0 {
                let draw: f64 = Poisson::new(b.counts)
                    .expect("means validated non-negative finite")
                    .sample(&mut rng);
                draw
            } else {
                0.0
            };
            Bin {
                e_low_kev: b.e_low_kev,
                e_high_kev: b.e_high_kev,
                counts,
                sigma: poisson_sigma(counts),
            }
        })
        .collect();
    BinnedSpectrum::new(
        bins,
        SpectrumUnit::Counts,
        ExposureRef::default(),
        String::from("simulated"),
    )
    .map_err(|_| SimError::BadRange {
        e_min_kev: cfg.e_min_kev,
        e_max_kev: cfg.e_max_kev,
    })
}

/// Copper-fluorescence scene: K_alpha and K_beta lines on a flat continuum,
/// plus the forbidden line when the current is on.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VipSimConfig {
    pub e_min_kev: f64,
    pub e_max_kev: f64,
    pub bin_width_kev: f64,
    pub kalpha_intensity: f64,
    pub kbeta_intensity: f64,
    pub flat_level_per_kev: f64,
    pub resolution_fwhm_kev: f64,
    pub seed: u64,
    pub poisson: bool,
}

impl Default for VipSimConfig {
    /// Illustrative scene magnitudes; not measurements.
    fn default() -> Self {
        Self {
            e_min_kev: 4.0,
            e_max_kev: 12.0,
            bin_width_kev: 0.05,
            kalpha_intensity: 3.0e4,
            kbeta_intensity: 4.5e3,
            flat_level_per_kev: 400.0,
            resolution_fwhm_kev: REFERENCE_FWHM_KEV,
            seed: 0,
            poisson: false,
        }
    }
}

impl VipSimConfig {
    /// The underlying generator configuration. `forbidden_intensity` is
    /// forced to zero when the current is off.
    pub fn to_sim_config(&self, current_on: bool, forbidden_intensity: f64) -> SimConfig {
        let mut lines = alloc::vec![
            Line {
                center_kev: CU_K_ALPHA_KEV,
                intensity_counts: self.kalpha_intensity,
            },
            Line {
                center_kev: CU_K_BETA_KEV,
                intensity_counts: self.kbeta_intensity,
            },
        ];
        if current_on && forbidden_intensity > 0.0 {
            lines.push(Line {
                center_kev: CU_K_ALPHA_FORBIDDEN_KEV,
                intensity_counts: forbidden_intensity,
            });
        }
        SimConfig {
            e_min_kev: self.e_min_kev,
            e_max_kev: self.e_max_kev,
            bin_width_kev: self.bin_width_kev,
            lines,
            resolution_fwhm_kev: self.resolution_fwhm_kev,
            continuum: Continuum::Flat {
                level_per_kev: self.flat_level_per_kev,
            },
            seed: self.seed,
            poisson: self.poisson,
        }
    }
}

/// Current-on/current-off copper spectrum.
pub fn vip_like_spectrum(
    current_on: bool,
    forbidden_intensity: f64,
    cfg: &VipSimConfig,
) -> Result<BinnedSpectrum, SimError> {
    if !(forbidden_intensity >= 0.0) || !forbidden_intensity.is_finite() {
        return Err(SimError::BadIntensity {
            index: 2,
            intensity: forbidden_intensity,
        });
    }
    let sim = cfg.to_sim_config(current_on, forbidden_intensity);
    if cfg.poisson {
        sample_spectrum(&sim)
    } else {
        expected_spectrum(&sim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::model_bin_integral;
    use crate::math::normal_cdf;

    fn flat_cfg() -> SimConfig {
        SimConfig {
            e_min_kev: 4.0,
            e_max_kev: 12.0,
            bin_width_kev: 0.05,
            lines: alloc::vec![],
            resolution_fwhm_kev: REFERENCE_FWHM_KEV,
            continuum: Continuum::Flat { level_per_kev: 7.0 },
            seed: 0,
            poisson: false,
        }
    }

    #[test]
    fn flat_continuum_fills_every_bin() {
        let s = expected_spectrum(&flat_cfg()).unwrap();
        assert_eq!(s.len(), 160);
        for b in s.bins() {
            assert!((b.counts - 7.0 * 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn single_line_conserves_intensity() {
        let mut cfg = flat_cfg();
        cfg.continuum = Continuum::Flat { level_per_kev: 0.0 };
        cfg.lines = alloc::vec![Line {
            center_kev: 8.0,
            intensity_counts: 1000.0,
        }];
        let s = expected_spectrum(&cfg).unwrap();
        let total: f64 = s.bins().iter().map(|b| b.counts).sum();
        assert!((total - 1000.0).abs() < 1e-3);
    }

    #[test]
    fn one_over_e_matches_fit_model() {
        let cfg = SimConfig {
            e_min_kev: 4.5,
            e_max_kev: 48.5,
            bin_width_kev: 1.0,
            lines: alloc::vec![],
            resolution_fwhm_kev: REFERENCE_FWHM_KEV,
            continuum: Continuum::OneOverE { alpha: 110.0 },
            seed: 0,
            poisson: false,
        };
        let s = expected_spectrum(&cfg).unwrap();
        assert_eq!(s.len(), 44);
        for b in s.bins() {
            let model = model_bin_integral(110.0, b.e_low_kev, b.e_high_kev).unwrap();
            assert!((b.counts - model).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_is_linear() {
        let mut a = flat_cfg();
        a.lines = alloc::vec![Line {
            center_kev: 8.0,
            intensity_counts: 500.0,
        }];
        let mut b = flat_cfg();
        b.continuum = Continuum::Flat { level_per_kev: 0.0 };
        b.lines = alloc::vec![Line {
            center_kev: 6.0,
            intensity_counts: 300.0,
        }];
        let mut sum = flat_cfg();
        sum.lines = alloc::vec![
            Line {
                center_kev: 8.0,
                intensity_counts: 500.0,
            },
            Line {
                center_kev: 6.0,
                intensity_counts: 300.0,
            },
        ];
        let sa = expected_spectrum(&a).unwrap();
        let sb = expected_spectrum(&b).unwrap();
        let ss = expected_spectrum(&sum).unwrap();
        for ((x, y), z) in sa.bins().iter().zip(sb.bins()).zip(ss.bins()) {
            assert!((x.counts + y.counts - z.counts).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let mut cfg = flat_cfg();
        cfg.poisson = true;
        cfg.seed = 42;
        cfg.lines = alloc::vec![Line {
            center_kev: 8.04,
            intensity_counts: 2000.0,
        }];
        let a = sample_spectrum(&cfg).unwrap();
        let b = sample_spectrum(&cfg).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 43;
        let c = sample_spectrum(&other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_mean_samples_to_zero() {
        let mut cfg = flat_cfg();
        cfg.poisson = true;
        cfg.continuum = Continuum::Flat { level_per_kev: 0.0 };
        let s = sample_spectrum(&cfg).unwrap();
        for b in s.bins() {
            assert_eq!(b.counts, 0.0);
            assert_eq!(b.sigma, 1.0);
        }
    }

    #[test]
    fn sampling_requires_the_flag() {
        let cfg = flat_cfg();
        assert!(matches!(
            sample_spectrum(&cfg),
            Err(SimError::PoissonFlagNotSet)
        ));
    }

    #[test]
    fn poisson_mean_statistics() {
        // single bin of mean 100, 10^4 replicas: the sample mean lands
        // within 3 standard errors (3 * 10/100 = 0.3)
        let cfg = SimConfig {
            e_min_kev: 1.0,
            e_max_kev: 2.0,
            bin_width_kev: 1.0,
            lines: alloc::vec![],
            resolution_fwhm_kev: REFERENCE_FWHM_KEV,
            continuum: Continuum::Flat {
                level_per_kev: 100.0,
            },
            seed: 0,
            poisson: true,
        };
        let n = 10_000;
        let mut total = 0.0;
        for seed in 0..n {
            let mut c = cfg.clone();
            c.seed = seed;
            total += sample_spectrum(&c).unwrap().bins()[0].counts;
        }
        let mean = total / n as f64;
        assert!((mean - 100.0).abs() < 0.3, "sample mean {mean}");
    }

    #[test]
    fn vip_scene_structure() {
        let cfg = VipSimConfig::default();
        let off = vip_like_spectrum(false, 500.0, &cfg).unwrap();
        let off_again = vip_like_spectrum(false, 0.0, &cfg).unwrap();
        // current off forces the forbidden intensity to zero
        assert_eq!(off, off_again);

        let on = vip_like_spectrum(true, 0.0, &cfg).unwrap();
        assert_eq!(on, off);

        let with_signal = vip_like_spectrum(true, 500.0, &cfg).unwrap();
        let diff: f64 = with_signal
            .bins()
            .iter()
            .zip(off.bins())
            .map(|(a, b)| a.counts - b.counts)
            .sum();
        assert!((diff - 500.0).abs() < 1e-3);
    }

    #[test]
    fn forbidden_roi_fraction_matches_cdf() {
        let cfg = VipSimConfig::default();
        let on = vip_like_spectrum(true, 500.0, &cfg).unwrap();
        let off = vip_like_spectrum(false, 0.0, &cfg).unwrap();
        let diff = crate::spectrum::subtract(&on, &off, 1.0).unwrap();
        let roi = diff.counts_in_roi(CU_K_ALPHA_FORBIDDEN_KEV, 0.48).unwrap();
        // the ROI keeps whole bins; integrate the Gaussian over the bins
        // actually covered
        let sigma = fwhm_to_sigma(cfg.resolution_fwhm_kev).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for b in diff.bins() {
            if b.e_low_kev >= CU_K_ALPHA_FORBIDDEN_KEV - 0.48
                && b.e_high_kev <= CU_K_ALPHA_FORBIDDEN_KEV + 0.48
            {
                lo = lo.min(b.e_low_kev);
                hi = hi.max(b.e_high_kev);
            }
        }
        let expect = 500.0
            * (normal_cdf((hi - CU_K_ALPHA_FORBIDDEN_KEV) / sigma)
                - normal_cdf((lo - CU_K_ALPHA_FORBIDDEN_KEV) / sigma));
        assert!((roi.counts - expect).abs() < 1e-6);
        assert!(roi.counts > 0.995 * 500.0);
    }

    #[test]
    fn outside_lines_warn_but_generate() {
        let mut cfg = flat_cfg();
        cfg.lines = alloc::vec![Line {
            center_kev: 60.0,
            intensity_counts: 100.0,
        }];
        let warnings = cfg.warnings();
        assert_eq!(warnings.len(), 1);
        assert!(matches!(
            warnings[0],
            SimWarning::LineOutsideRange { index: 0, .. }
        ));
        assert!(expected_spectrum(&cfg).is_ok());
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = flat_cfg();
        cfg.bin_width_kev = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = flat_cfg();
        cfg.e_max_kev = cfg.e_min_kev;
        assert!(cfg.validate().is_err());

        let mut cfg = flat_cfg();
        cfg.bin_width_kev = 0.3;
        assert!(matches!(cfg.validate(), Err(SimError::NotDivisible { .. })));

        let mut cfg = flat_cfg();
        cfg.continuum = Continuum::OneOverE { alpha: 10.0 };
        cfg.e_min_kev = 0.0;
        assert!(matches!(
            cfg.validate(),
            Err(SimError::OneOverEFromZero { .. })
        ));

        let mut cfg = flat_cfg();
        cfg.lines = alloc::vec![Line {
            center_kev: 8.0,
            intensity_counts: -1.0,
        }];
        assert!(matches!(cfg.validate(), Err(SimError::BadIntensity { .. })));
    }
}

//! Binned energy spectra: the container every pipeline consumes, plus range
//! selection, on/off subtraction with error propagation, and
//! region-of-interest counting.
//!
//! Spectra are immutable after construction and all operations are pure, so
//! concurrent reads are safe.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Relative tolerance when checking that adjacent bin edges touch.
const EDGE_TOLERANCE: f64 = 1e-9;

/// Default uncertainty assigned to an empty Poisson bin.
pub const DEFAULT_EMPTY_BIN_SIGMA: f64 = 1.0;

/// Poisson uncertainty convention: sqrt(counts), with
/// [`DEFAULT_EMPTY_BIN_SIGMA`] for an empty bin.
pub fn poisson_sigma(counts: f64) -> f64 {
    poisson_sigma_with_empty(counts, DEFAULT_EMPTY_BIN_SIGMA)
}

/// Same as [`poisson_sigma`], with a configurable empty-bin uncertainty.
pub fn poisson_sigma_with_empty(counts: f64, empty_sigma: f64) -> f64 {
    if counts > 0.0 {
        libm::sqrt(counts)
    } else {
        empty_sigma
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("spectrum has no bins")]
    Empty,
    #[error("bin {index}: non-finite entry")]
    NonFinite { index: usize },
    #[error("bin {index}: e_low {e_low} must be < e_high {e_high}")]
    InvalidEdges {
        index: usize,
        e_low: f64,
        e_high: f64,
    },
    #[error("bin {index}: negative counts {counts}")]
    NegativeCounts { index: usize, counts: f64 },
    #[error("bin {index}: negative sigma {sigma}")]
    NegativeSigma { index: usize, sigma: f64 },
    #[error("bin {index} starts at {next_low} but the previous bin ends at {prev_high}; bins must be contiguous and increasing")]
    NonContiguous {
        index: usize,
        prev_high: f64,
        next_low: f64,
    },
    #[error("invalid selection range: lo {lo} must be < hi {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("selection [{lo}, {hi}] keV contains no complete bin")]
    EmptySelection { lo: f64, hi: f64 },
    #[error("spectra have {left} and {right} bins; identical binning required")]
    LengthMismatch { left: usize, right: usize },
    #[error("binning mismatch at bin {index}: [{left_low}, {left_high}] vs [{right_low}, {right_high}]")]
    BinningMismatch {
        index: usize,
        left_low: f64,
        left_high: f64,
        right_low: f64,
        right_high: f64,
    },
    #[error("live-time ratio must be finite and non-negative, got {ratio}")]
    InvalidRatio { ratio: f64 },
    #[error("ROI half-width must be strictly positive, got {half_width}")]
    InvalidRoi { half_width: f64 },
    #[error("{name} must be strictly positive to rescale a normalized spectrum, got {value}")]
    InvalidExposure { name: &'static str, value: f64 },
    #[error("ROI [{lo}, {hi}] keV contains no complete bin")]
    EmptyRoi { lo: f64, hi: f64 },
}

/// One energy bin: `[e_low_kev, e_high_kev)` with its content and
/// uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bin {
    pub e_low_kev: f64,
    pub e_high_kev: f64,
    pub counts: f64,
    pub sigma: f64,
}

impl Bin {
    pub fn center_kev(&self) -> f64 {
        0.5 * (self.e_low_kev + self.e_high_kev)
    }

    pub fn width_kev(&self) -> f64 {
        self.e_high_kev - self.e_low_kev
    }
}

/// Normalization convention of the stored bin contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SpectrumUnit {
    /// Raw counts per bin.
    #[default]
    Counts,
    /// Counts per keV per kg per day.
    CountsPerKevKgDay,
}

impl SpectrumUnit {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumUnit::Counts => "counts",
            SpectrumUnit::CountsPerKevKgDay => "counts_per_kev_kg_day",
        }
    }
}

impl fmt::Display for SpectrumUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown spectrum unit '{0}'; expected 'counts' or 'counts_per_kev_kg_day'")]
pub struct UnknownUnit(pub String);

impl FromStr for SpectrumUnit {
    type Err = UnknownUnit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "counts" => Ok(SpectrumUnit::Counts),
            "counts_per_kev_kg_day" => Ok(SpectrumUnit::CountsPerKevKgDay),
            other => Err(UnknownUnit(String::from(other))),
        }
    }
}

/// Exposure metadata carried by a spectrum. Both entries are optional; the
/// conversions that need them fail loudly when they are missing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExposureRef {
    pub live_time_days: Option<f64>,
    pub detector_mass_kg: Option<f64>,
}

/// Result of a region-of-interest sum.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoiCounts {
    pub counts: f64,
    pub sigma: f64,
}

/// An ordered, contiguous, validated set of energy bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSpectrum {
    bins: Vec<Bin>,
    unit: SpectrumUnit,
    exposure: ExposureRef,
    label: String,
}

/// Result of an on/off subtraction: same binning, values may be negative,
/// per-bin sigma from quadrature propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtractedSpectrum {
    bins: Vec<Bin>,
    unit: SpectrumUnit,
    normalization_ratio: f64,
    label: String,
}

fn validate_structure(bins: &[Bin], allow_negative: bool) -> Result<(), SpectrumError> {
    if bins.is_empty() {
        return Err(SpectrumError::Empty);
    }
    for (index, b) in bins.iter().enumerate() {
        if !(b.e_low_kev.is_finite()
            && b.e_high_kev.is_finite()
            && b.counts.is_finite()
            && b.sigma.is_finite())
        {
            return Err(SpectrumError::NonFinite { index });
        }
        if b.e_low_kev >= b.e_high_kev {
            return Err(SpectrumError::InvalidEdges {
                index,
                e_low: b.e_low_kev,
                e_high: b.e_high_kev,
            });
        }
        if !allow_negative && b.counts < 0.0 {
            return Err(SpectrumError::NegativeCounts {
                index,
                counts: b.counts,
            });
        }
        if b.sigma < 0.0 {
            return Err(SpectrumError::NegativeSigma {
                index,
                sigma: b.sigma,
            });
        }
        if index > 0 {
            let prev_high = bins[index - 1].e_high_kev;
            let tol = EDGE_TOLERANCE * if prev_high.abs() > 1.0 { prev_high.abs() } else { 1.0 };
            if (b.e_low_kev - prev_high).abs() > tol {
                return Err(SpectrumError::NonContiguous {
                    index,
                    prev_high,
                    next_low: b.e_low_kev,
                });
            }
        }
    }
    Ok(())
}

impl BinnedSpectrum {
    /// Build a spectrum and enforce the bin invariants: contiguous strictly
    /// increasing edges, finite non-negative contents.
    pub fn new(
        bins: Vec<Bin>,
        unit: SpectrumUnit,
        exposure: ExposureRef,
        label: String,
    ) -> Result<Self, SpectrumError> {
        validate_structure(&bins, false)?;
        Ok(Self {
            bins,
            unit,
            exposure,
            label,
        })
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn unit(&self) -> SpectrumUnit {
        self.unit
    }

    pub fn exposure(&self) -> ExposureRef {
        self.exposure
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn e_min_kev(&self) -> f64 {
        self.bins[0].e_low_kev
    }

    pub fn e_max_kev(&self) -> f64 {
        self.bins[self.bins.len() - 1].e_high_kev
    }

    /// Keep only bins fully contained in `[lo, hi]` keV. Bin edges are never
    /// split; a bin straddling either boundary is dropped.
    pub fn select_range(&self, lo: f64, hi: f64) -> Result<Self, SpectrumError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(SpectrumError::InvalidRange { lo, hi });
        }
        let selected: Vec<Bin> = self
            .bins
            .iter()
            .filter(|b| b.e_low_kev >= lo && b.e_high_kev <= hi)
            .copied()
            .collect();
        if selected.is_empty() {
            return Err(SpectrumError::EmptySelection { lo, hi });
        }
        Ok(Self {
            bins: selected,
            unit: self.unit,
            exposure: self.exposure,
            label: self.label.clone(),
        })
    }

    /// Sum of the bins fully inside `[center - half_width, center + half_width]`,
    /// with the quadrature sum of their sigmas.
    pub fn counts_in_roi(&self, center: f64, half_width: f64) -> Result<RoiCounts, SpectrumError> {
        roi_sum(&self.bins, center, half_width)
    }

    /// Rescale a normalized (counts/keV/kg/day) spectrum to raw counts:
    /// each bin-averaged density becomes `value * width * mass * days`, with
    /// the sigma scaled by the same factor. A spectrum already in counts is
    /// returned unchanged. The scaling is exact and invertible, so fits on
    /// the result translate back to the density convention without loss.
    pub fn to_raw_counts(
        &self,
        detector_mass_kg: f64,
        live_time_days: f64,
    ) -> Result<Self, SpectrumError> {
        if self.unit == SpectrumUnit::Counts {
            return Ok(self.clone());
        }
        if !(detector_mass_kg > 0.0) || !detector_mass_kg.is_finite() {
            return Err(SpectrumError::InvalidExposure {
                name: "detector_mass_kg",
                value: detector_mass_kg,
            });
        }
        if !(live_time_days > 0.0) || !live_time_days.is_finite() {
            return Err(SpectrumError::InvalidExposure {
                name: "live_time_days",
                value: live_time_days,
            });
        }
        let bins = self
            .bins
            .iter()
            .map(|b| {
                let scale = b.width_kev() * detector_mass_kg * live_time_days;
                Bin {
                    e_low_kev: b.e_low_kev,
                    e_high_kev: b.e_high_kev,
                    counts: b.counts * scale,
                    sigma: b.sigma * scale,
                }
            })
            .collect();
        Ok(Self {
            bins,
            unit: SpectrumUnit::Counts,
            exposure: ExposureRef {
                live_time_days: Some(live_time_days),
                detector_mass_kg: Some(detector_mass_kg),
            },
            label: self.label.clone(),
        })
    }
}

impl SubtractedSpectrum {
    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn unit(&self) -> SpectrumUnit {
        self.unit
    }

    pub fn normalization_ratio(&self) -> f64 {
        self.normalization_ratio
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn counts_in_roi(&self, center: f64, half_width: f64) -> Result<RoiCounts, SpectrumError> {
        roi_sum(&self.bins, center, half_width)
    }
}

/// Bin-wise `on - ratio * off` with quadrature error propagation:
/// `sigma^2 = sigma_on^2 + ratio^2 * sigma_off^2`. `ratio` is the on/off
/// live-time ratio; both spectra must share the exact same binning.
pub fn subtract(
    on: &BinnedSpectrum,
    off: &BinnedSpectrum,
    ratio: f64,
) -> Result<SubtractedSpectrum, SpectrumError> {
    if !(ratio >= 0.0) || !ratio.is_finite() {
        return Err(SpectrumError::InvalidRatio { ratio });
    }
    if on.bins.len() != off.bins.len() {
        return Err(SpectrumError::LengthMismatch {
            left: on.bins.len(),
            right: off.bins.len(),
        });
    }
    for (index, (a, b)) in on.bins.iter().zip(off.bins.iter()).enumerate() {
        if a.e_low_kev != b.e_low_kev || a.e_high_kev != b.e_high_kev {
            return Err(SpectrumError::BinningMismatch {
                index,
                left_low: a.e_low_kev,
                left_high: a.e_high_kev,
                right_low: b.e_low_kev,
                right_high: b.e_high_kev,
            });
        }
    }
    let bins = on
        .bins
        .iter()
        .zip(off.bins.iter())
        .map(|(a, b)| Bin {
            e_low_kev: a.e_low_kev,
            e_high_kev: a.e_high_kev,
            counts: a.counts - ratio * b.counts,
            sigma: libm::sqrt(a.sigma * a.sigma + ratio * ratio * b.sigma * b.sigma),
        })
        .collect();
    Ok(SubtractedSpectrum {
        bins,
        unit: on.unit,
        normalization_ratio: ratio,
        label: on.label.clone(),
    })
}

// The ROI boundaries arrive as center +/- half_width, a computed quantity,
// so a bin edge meant to coincide with a boundary can miss it by one ulp.
// Boundary comparisons therefore carry the same relative tolerance as the
// contiguity check.
fn roi_sum(bins: &[Bin], center: f64, half_width: f64) -> Result<RoiCounts, SpectrumError> {
    if !(half_width > 0.0) || !half_width.is_finite() || !center.is_finite() {
        return Err(SpectrumError::InvalidRoi { half_width });
    }
    let lo = center - half_width;
    let hi = center + half_width;
    let scale = libm::fmax(libm::fabs(lo), libm::fmax(libm::fabs(hi), 1.0));
    let tol = EDGE_TOLERANCE * scale;
    let mut counts = 0.0;
    let mut var = 0.0;
    let mut any = false;
    for b in bins {
        if b.e_low_kev >= lo - tol && b.e_high_kev <= hi + tol {
            counts += b.counts;
            var += b.sigma * b.sigma;
            any = true;
        }
    }
    if !any {
        return Err(SpectrumError::EmptyRoi { lo, hi });
    }
    Ok(RoiCounts {
        counts,
        sigma: libm::sqrt(var),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn uniform(lo: f64, width: f64, counts: &[f64]) -> BinnedSpectrum {
        let bins = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| Bin {
                e_low_kev: lo + i as f64 * width,
                e_high_kev: lo + (i + 1) as f64 * width,
                counts: c,
                sigma: poisson_sigma(c),
            })
            .collect();
        BinnedSpectrum::new(bins, SpectrumUnit::Counts, ExposureRef::default(), String::new())
            .unwrap()
    }

    #[test]
    fn construction_enforces_edge_order() {
        let bins = vec![Bin {
            e_low_kev: 2.0,
            e_high_kev: 1.0,
            counts: 0.0,
            sigma: 1.0,
        }];
        let err = BinnedSpectrum::new(
            bins,
            SpectrumUnit::Counts,
            ExposureRef::default(),
            String::new(),
        )
        .unwrap_err();
        assert!(matches!(err, SpectrumError::InvalidEdges { index: 0, .. }));
    }

    #[test]
    fn construction_rejects_gaps() {
        let bins = vec![
            Bin {
                e_low_kev: 0.0,
                e_high_kev: 1.0,
                counts: 1.0,
                sigma: 1.0,
            },
            Bin {
                e_low_kev: 1.5,
                e_high_kev: 2.0,
                counts: 1.0,
                sigma: 1.0,
            },
        ];
        let err = BinnedSpectrum::new(
            bins,
            SpectrumUnit::Counts,
            ExposureRef::default(),
            String::new(),
        )
        .unwrap_err();
        assert!(matches!(err, SpectrumError::NonContiguous { index: 1, .. }));
    }

    #[test]
    fn construction_rejects_nan_and_negatives() {
        let nan = vec![Bin {
            e_low_kev: 0.0,
            e_high_kev: 1.0,
            counts: f64::NAN,
            sigma: 1.0,
        }];
        assert!(matches!(
            BinnedSpectrum::new(nan, SpectrumUnit::Counts, ExposureRef::default(), String::new()),
            Err(SpectrumError::NonFinite { index: 0 })
        ));
        let neg = vec![Bin {
            e_low_kev: 0.0,
            e_high_kev: 1.0,
            counts: -3.0,
            sigma: 1.0,
        }];
        assert!(matches!(
            BinnedSpectrum::new(neg, SpectrumUnit::Counts, ExposureRef::default(), String::new()),
            Err(SpectrumError::NegativeCounts { index: 0, .. })
        ));
    }

    #[test]
    fn select_full_range_is_identity() {
        let s = uniform(0.0, 1.0, &[1.0, 2.0, 3.0]);
        let sel = s.select_range(0.0, 3.0).unwrap();
        assert_eq!(sel.bins(), s.bins());
    }

    #[test]
    fn select_counts_fully_contained_bins() {
        // Half-integer edges (the natural alignment for a 4.5-48.5 keV
        // window): [4.5, 48.5] keeps exactly the 44 bins [4.5,5.5)..[47.5,48.5).
        let s = uniform(0.5, 1.0, &vec![1.0; 99]);
        let sel = s.select_range(4.5, 48.5).unwrap();
        assert_eq!(sel.len(), 44);
        assert_eq!(sel.e_min_kev(), 4.5);
        assert_eq!(sel.e_max_kev(), 48.5);

        // Integer edges: straddling bins [4,5) and [48,49) are dropped,
        // leaving [5,6)..[47,48).
        let s = uniform(0.0, 1.0, &vec![1.0; 100]);
        let sel = s.select_range(4.5, 48.5).unwrap();
        assert_eq!(sel.len(), 43);
        assert_eq!(sel.e_min_kev(), 5.0);
        assert_eq!(sel.e_max_kev(), 48.0);
    }

    #[test]
    fn select_outside_spectrum_is_an_error() {
        let s = uniform(0.0, 1.0, &[1.0; 100]);
        assert!(matches!(
            s.select_range(200.0, 300.0),
            Err(SpectrumError::EmptySelection { .. })
        ));
        assert!(matches!(
            s.select_range(5.0, 5.0),
            Err(SpectrumError::InvalidRange { .. })
        ));
    }

    #[test]
    fn subtract_self_is_zero() {
        let s = uniform(0.0, 1.0, &[4.0, 9.0, 16.0]);
        let d = subtract(&s, &s, 1.0).unwrap();
        for (b, orig) in d.bins().iter().zip(s.bins()) {
            assert_eq!(b.counts, 0.0);
            assert!((b.sigma - libm::sqrt(2.0) * orig.sigma).abs() < 1e-12);
        }
    }

    #[test]
    fn subtract_hand_example() {
        let on = uniform(0.0, 1.0, &[100.0]);
        let off = uniform(0.0, 1.0, &[40.0]);
        let d = subtract(&on, &off, 0.5).unwrap();
        assert!((d.bins()[0].counts - 80.0).abs() < 1e-12);
        assert!((d.bins()[0].sigma - libm::sqrt(100.0 + 0.25 * 40.0)).abs() < 1e-12);
    }

    #[test]
    fn subtract_ratio_zero_returns_on() {
        let on = uniform(0.0, 1.0, &[7.0, 3.0]);
        let off = uniform(0.0, 1.0, &[100.0, 100.0]);
        let d = subtract(&on, &off, 0.0).unwrap();
        for (b, orig) in d.bins().iter().zip(on.bins()) {
            assert_eq!(b.counts, orig.counts);
            assert_eq!(b.sigma, orig.sigma);
        }
    }

    #[test]
    fn subtract_requires_identical_binning() {
        let a = uniform(0.0, 1.0, &[1.0, 1.0]);
        let b = uniform(0.5, 1.0, &[1.0, 1.0]);
        assert!(matches!(
            subtract(&a, &b, 1.0),
            Err(SpectrumError::BinningMismatch { index: 0, .. })
        ));
        let c = uniform(0.0, 1.0, &[1.0, 1.0, 1.0]);
        assert!(matches!(
            subtract(&a, &c, 1.0),
            Err(SpectrumError::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn sigma_reconstruction_identity() {
        let on = uniform(0.0, 0.5, &[12.0, 0.0, 7.0, 5.0]);
        let off = uniform(0.0, 0.5, &[3.0, 8.0, 0.0, 2.0]);
        let r = 0.73;
        let d = subtract(&on, &off, r).unwrap();
        for ((db, ob), fb) in d.bins().iter().zip(on.bins()).zip(off.bins()) {
            let expect = ob.sigma * ob.sigma + r * r * fb.sigma * fb.sigma;
            assert!((db.sigma * db.sigma - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn roi_whole_spectrum_is_total() {
        let s = uniform(0.0, 1.0, &[1.0, 2.0, 3.0, 4.0]);
        let roi = s.counts_in_roi(2.0, 10.0).unwrap();
        assert_eq!(roi.counts, 10.0);
    }

    #[test]
    fn roi_matches_brute_force_sum() {
        let counts: Vec<f64> = (0..200).map(|i| (i % 13) as f64).collect();
        let s = uniform(3.0, 0.05, &counts);
        let center = 7.729;
        let hw = 0.48;
        let roi = s.counts_in_roi(center, hw).unwrap();
        let mut c = 0.0;
        let mut v = 0.0;
        for b in s.bins() {
            if b.e_low_kev >= center - hw && b.e_high_kev <= center + hw {
                c += b.counts;
                v += b.sigma * b.sigma;
            }
        }
        assert_eq!(roi.counts, c);
        assert!((roi.sigma - libm::sqrt(v)).abs() < 1e-12);
    }

    #[test]
    fn roi_boundary_tolerates_computed_edges() {
        // 7.729 - 0.48 rounds one ulp above 7.249; bins whose edges were
        // written to coincide with the boundary must still be inside.
        let bins = vec![
            Bin {
                e_low_kev: 7.249,
                e_high_kev: 7.729,
                counts: 5.0,
                sigma: 1.0,
            },
            Bin {
                e_low_kev: 7.729,
                e_high_kev: 8.209,
                counts: 7.0,
                sigma: 1.0,
            },
        ];
        let s = BinnedSpectrum::new(
            bins,
            SpectrumUnit::Counts,
            ExposureRef::default(),
            String::new(),
        )
        .unwrap();
        let roi = s.counts_in_roi(7.729, 0.48).unwrap();
        assert_eq!(roi.counts, 12.0);
    }

    #[test]
    fn roi_in_empty_region_is_zero() {
        let mut counts = vec![0.0; 100];
        counts[10] = 50.0;
        let bins: Vec<Bin> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| Bin {
                e_low_kev: i as f64 * 0.1,
                e_high_kev: (i + 1) as f64 * 0.1,
                counts: c,
                sigma: 0.0,
            })
            .collect();
        let s = BinnedSpectrum::new(
            bins,
            SpectrumUnit::Counts,
            ExposureRef::default(),
            String::new(),
        )
        .unwrap();
        let roi = s.counts_in_roi(8.0, 0.5).unwrap();
        assert_eq!(roi.counts, 0.0);
        assert_eq!(roi.sigma, 0.0);
    }

    #[test]
    fn roi_outside_spectrum_errors() {
        let s = uniform(0.0, 1.0, &[1.0; 10]);
        assert!(matches!(
            s.counts_in_roi(50.0, 1.0),
            Err(SpectrumError::EmptyRoi { .. })
        ));
        assert!(matches!(
            s.counts_in_roi(5.0, 0.0),
            Err(SpectrumError::InvalidRoi { .. })
        ));
    }

    #[test]
    fn raw_count_rescaling() {
        // 0.5-keV bins of bin-averaged density; 2 kg, 100 days.
        let bins = vec![
            Bin {
                e_low_kev: 4.5,
                e_high_kev: 5.0,
                counts: 3.0,
                sigma: 0.2,
            },
            Bin {
                e_low_kev: 5.0,
                e_high_kev: 5.5,
                counts: 1.5,
                sigma: 0.1,
            },
        ];
        let s = BinnedSpectrum::new(
            bins,
            SpectrumUnit::CountsPerKevKgDay,
            ExposureRef::default(),
            String::new(),
        )
        .unwrap();
        let raw = s.to_raw_counts(2.0, 100.0).unwrap();
        assert_eq!(raw.unit(), SpectrumUnit::Counts);
        // 3.0 /keV/kg/day * 0.5 keV * 2 kg * 100 d = 300 counts
        assert!((raw.bins()[0].counts - 300.0).abs() < 1e-12);
        assert!((raw.bins()[0].sigma - 20.0).abs() < 1e-12);
        assert!((raw.bins()[1].counts - 150.0).abs() < 1e-12);
        assert_eq!(raw.exposure().detector_mass_kg, Some(2.0));

        // counts spectra pass through untouched
        let already = uniform(0.0, 1.0, &[5.0]);
        let same = already.to_raw_counts(2.0, 100.0).unwrap();
        assert_eq!(same.bins(), already.bins());

        assert!(s.to_raw_counts(0.0, 100.0).is_err());
        assert!(s.to_raw_counts(2.0, f64::NAN).is_err());
    }

    #[test]
    fn poisson_sigma_convention() {
        assert_eq!(poisson_sigma(0.0), 1.0);
        assert_eq!(poisson_sigma(16.0), 4.0);
        assert_eq!(poisson_sigma_with_empty(0.0, 0.0), 0.0);
    }

    #[test]
    fn unit_tag_round_trip() {
        for unit in [SpectrumUnit::Counts, SpectrumUnit::CountsPerKevKgDay] {
            assert_eq!(unit.as_str().parse::<SpectrumUnit>().unwrap(), unit);
        }
        assert!("pears".parse::<SpectrumUnit>().is_err());
    }
}

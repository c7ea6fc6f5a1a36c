//! Weighted least-squares fit of the 1/E spectral amplitude and the
//! Bayesian upper limit under a non-negativity prior.
//!
//! The model is linear in the amplitude: the expected content of a bin
//! `[e_low, e_high]` is `alpha * ln(e_high / e_low)`, the exact integral of
//! `alpha / E`. The chi-square is therefore an exact parabola in alpha and
//! the minimizer has the closed form implemented here. The likelihood is
//! Gaussian per bin with the declared sigmas; the posterior for the upper
//! limit is that Gaussian truncated to `alpha >= 0` under a flat prior.

use thiserror::Error;

use crate::math::{normal_cdf, normal_quantile};
use crate::spectrum::BinnedSpectrum;

pub const DEFAULT_CONFIDENCE_LEVEL: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FitError {
    #[error("bin edges must satisfy 0 < e_low < e_high, got [{e_low}, {e_high}]")]
    InvalidEdges { e_low: f64, e_high: f64 },
    #[error("fit needs at least 2 bins, got {n}")]
    TooFewBins { n: usize },
    #[error("bin {index}: sigma must be finite and strictly positive, got {sigma}")]
    BadSigma { index: usize, sigma: f64 },
    #[error("weights carry no information: sum of f_i^2/sigma_i^2 is not positive")]
    DegenerateWeights,
    #[error("sigma_alpha must be finite and strictly positive, got {0}")]
    BadSigmaAlpha(f64),
    #[error("alpha_hat must be finite, got {0}")]
    BadAlphaHat(f64),
    #[error("confidence level must lie in (0.5, 1), got {0}")]
    BadConfidenceLevel(f64),
}

/// Fit summary. `alpha_upper`/`confidence_level` stay `None` until an upper
/// limit is attached.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub alpha_hat: f64,
    pub sigma_alpha: f64,
    pub chi2: f64,
    pub ndf: usize,
    pub alpha_upper: Option<f64>,
    pub confidence_level: Option<f64>,
}

impl FitResult {
    pub fn reduced_chi2(&self) -> f64 {
        self.chi2 / self.ndf as f64
    }
}

/// Exact integral of `alpha / E` over one bin: `alpha * ln(e_high / e_low)`.
pub fn model_bin_integral(alpha: f64, e_low: f64, e_high: f64) -> Result<f64, FitError> {
    check_edges(e_low, e_high)?;
    Ok(alpha * libm::log(e_high / e_low))
}

/// Center-evaluation alternative: `alpha / center * width`. Kept for
/// comparison with the exact integral; agrees within 0.5% for bins narrower
/// than 1 keV above 4.5 keV.
pub fn model_bin_center_eval(alpha: f64, e_low: f64, e_high: f64) -> Result<f64, FitError> {
    check_edges(e_low, e_high)?;
    Ok(alpha / (0.5 * (e_low + e_high)) * (e_high - e_low))
}

fn check_edges(e_low: f64, e_high: f64) -> Result<(), FitError> {
    if !(e_low > 0.0) || !(e_high > e_low) || !e_low.is_finite() || !e_high.is_finite() {
        return Err(FitError::InvalidEdges { e_low, e_high });
    }
    Ok(())
}

/// Chi-square of the 1/E model at a given amplitude, with the spectrum's
/// declared sigmas.
pub fn chi2_at(spec: &BinnedSpectrum, alpha: f64) -> Result<f64, FitError> {
    let mut chi2 = 0.0;
    for (index, b) in spec.bins().iter().enumerate() {
        check_edges(b.e_low_kev, b.e_high_kev)?;
        if !(b.sigma > 0.0) || !b.sigma.is_finite() {
            return Err(FitError::BadSigma {
                index,
                sigma: b.sigma,
            });
        }
        let f = libm::log(b.e_high_kev / b.e_low_kev);
        let r = (b.counts - alpha * f) / b.sigma;
        chi2 += r * r;
    }
    Ok(chi2)
}

/// Closed-form weighted least-squares estimate of the 1/E amplitude.
///
/// `alpha_hat = sum(n_i f_i / sigma_i^2) / sum(f_i^2 / sigma_i^2)` with
/// `f_i = ln(e_high_i / e_low_i)`; this is the exact minimizer of the
/// weighted chi-square. `ndf = N - 1` for the one fitted parameter. The
/// upper-limit fields are left empty.
pub fn fit_one_over_e(spec: &BinnedSpectrum) -> Result<FitResult, FitError> {
    let n = spec.len();
    if n < 2 {
        return Err(FitError::TooFewBins { n });
    }
    let mut s_nf = 0.0;
    let mut s_ff = 0.0;
    for (index, b) in spec.bins().iter().enumerate() {
        check_edges(b.e_low_kev, b.e_high_kev)?;
        if !(b.sigma > 0.0) || !b.sigma.is_finite() {
            return Err(FitError::BadSigma {
                index,
                sigma: b.sigma,
            });
        }
        let f = libm::log(b.e_high_kev / b.e_low_kev);
        let w = 1.0 / (b.sigma * b.sigma);
        s_nf += b.counts * f * w;
        s_ff += f * f * w;
    }
    if !(s_ff > 0.0) || !s_ff.is_finite() {
        return Err(FitError::DegenerateWeights);
    }
    let alpha_hat = s_nf / s_ff;
    let sigma_alpha = 1.0 / libm::sqrt(s_ff);
    let chi2 = chi2_at(spec, alpha_hat)?;
    Ok(FitResult {
        alpha_hat,
        sigma_alpha,
        chi2,
        ndf: n - 1,
        alpha_upper: None,
        confidence_level: None,
    })
}

/// The `cl`-quantile of a Gaussian(alpha_hat, sigma_alpha) truncated to
/// `alpha >= 0` and renormalized.
///
/// Solved through the upper tail for numerical stability far from zero:
/// the limit x satisfies `1 - Phi((x - ahat)/sigma) = (1 - cl) * Phi(ahat/sigma)`,
/// algebraically identical to the quantile form
/// `x = ahat + sigma * Phi^-1(cl + (1-cl) * Phi(-ahat/sigma))`.
pub fn bayesian_upper_limit(
    alpha_hat: f64,
    sigma_alpha: f64,
    cl: f64,
) -> Result<f64, FitError> {
    if !alpha_hat.is_finite() {
        return Err(FitError::BadAlphaHat(alpha_hat));
    }
    if !(sigma_alpha > 0.0) || !sigma_alpha.is_finite() {
        return Err(FitError::BadSigmaAlpha(sigma_alpha));
    }
    if !(cl > 0.5 && cl < 1.0) {
        return Err(FitError::BadConfidenceLevel(cl));
    }
    let p_tail = (1.0 - cl) * normal_cdf(alpha_hat / sigma_alpha);
    if p_tail == 0.0 {
        // alpha_hat below roughly -37 sigma: the posterior mass is pinned
        // against zero beyond double precision.
        return Ok(0.0);
    }
    let z = -normal_quantile(p_tail);
    Ok(alpha_hat + sigma_alpha * z)
}

/// Fit and attach the Bayesian upper limit at the given confidence level.
pub fn fit_with_upper_limit(
    spec: &BinnedSpectrum,
    cl: f64,
) -> Result<FitResult, FitError> {
    let mut fit = fit_one_over_e(spec)?;
    fit.alpha_upper = Some(bayesian_upper_limit(fit.alpha_hat, fit.sigma_alpha, cl)?);
    fit.confidence_level = Some(cl);
    Ok(fit)
}

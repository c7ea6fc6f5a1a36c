//! Gaussian special functions used by the fit and the spectrum simulator.
//!
//! `no_std` builds cannot reach the `statrs`-style distribution crates, so
//! the two functions the pipelines actually need -- the normal CDF and its
//! inverse -- are implemented here on top of `libm`.

use core::f64::consts::{PI, SQRT_2};

/// Standard normal cumulative distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    // erfc form stays accurate in the lower tail.
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    libm::exp(-0.5 * z * z) / libm::sqrt(2.0 * PI)
}

/// Inverse of the standard normal CDF.
///
/// Acklam's rational approximation (|error| < 1.2e-9) polished by two Halley
/// steps against [`normal_cdf`], which brings the result to machine
/// precision. Returns NaN outside (0, 1).
// Coefficients quoted verbatim, trailing zeros included.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e / normal_pdf(x);
        x -= u / (1.0 + x * u / 2.0);
    }
    x
}

/// Integral of a Gaussian of total area 1, centre `center`, width `sigma`
/// over the interval `[lo, hi]`, via the CDF difference.
pub fn gaussian_bin_integral(center: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    normal_cdf((hi - center) / sigma) - normal_cdf((lo - center) / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        // Phi(1) = 0.8413447460685429
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert!((normal_cdf(-1.0) + normal_cdf(1.0) - 1.0).abs() < 1e-14);
        assert!(normal_cdf(-40.0) >= 0.0);
        assert!(normal_cdf(40.0) <= 1.0);
    }

    #[test]
    fn quantile_reference_points() {
        // values computed with 30-digit arithmetic
        assert!((normal_quantile(0.90) - 1.281_551_565_544_601).abs() < 1e-12);
        assert!((normal_quantile(0.95) - 1.644_853_626_951_472).abs() < 1e-12);
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
        assert!(normal_quantile(0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_round_trip() {
        let mut p = 1e-6;
        while p < 1.0 {
            let z = normal_quantile(p);
            assert!(
                (normal_cdf(z) - p).abs() < 1e-13,
                "round trip failed at p={p}"
            );
            p += 0.0137;
        }
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        assert!(normal_quantile(0.0).is_nan());
        assert!(normal_quantile(1.0).is_nan());
        assert!(normal_quantile(-0.3).is_nan());
    }

    #[test]
    fn bin_integral_covers_everything() {
        let total = gaussian_bin_integral(5.0, 0.3, -100.0, 100.0);
        assert!((total - 1.0).abs() < 1e-14);
        let half = gaussian_bin_integral(5.0, 0.3, -100.0, 5.0);
        assert!((half - 0.5).abs() < 1e-14);
    }
}

//! Numerical core for setting upper limits from low-background X-ray spectra.
//!
//! Two analysis chains are covered:
//!
//! * a weighted least-squares fit of a `1/E` spectral shape to a binned
//!   energy spectrum, with a Bayesian upper limit on the amplitude and the
//!   conversion of that amplitude into a bound on the spontaneous-collapse
//!   rate parameter lambda ([`fit`], [`collapse`]);
//! * the Ramberg-Snow current-on/current-off counting argument that turns a
//!   region-of-interest excess into a bound on the Pauli-violation
//!   probability beta^2/2 ([`pep`]).
//!
//! [`spectrum`] holds the binned-spectrum container and its arithmetic,
//! [`sim`] generates seedable synthetic spectra for closure tests, and
//! [`constants`] pins the physical constants and unit conversions everything
//! else relies on. The crate is `no_std` (with `alloc`); file formats and
//! the command-line front end live in the companion `limitkit` crate.

#![no_std]
#![deny(unsafe_code)]
// Validation guards are written as `!(x > 0.0)` on purpose: the negated
// comparison is the branch that also catches NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constants;
pub mod collapse;
pub mod fit;
pub mod math;
pub mod pep;
pub mod sim;
pub mod spectrum;

pub use constants::PhysicalConstants;
pub use spectrum::{BinnedSpectrum, SpectrumUnit, SubtractedSpectrum};

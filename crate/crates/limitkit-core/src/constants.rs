//! Pinned physical constants and the unit conversions the pipelines need.
//!
//! Values are CODATA-class reference values, stored in one place so every
//! downstream module is dimensionally consistent. Energies are in keV and
//! natural units (hbar = c = 1) are used wherever a length has to meet an
//! energy.

use thiserror::Error;

/// Conversion factor between a Gaussian FWHM and its sigma: 2*sqrt(2 ln 2).
pub const FWHM_OVER_SIGMA: f64 = 2.354_820_045_030_949_4;

/// Copper K-alpha transition energy (keV).
pub const CU_K_ALPHA_KEV: f64 = 8.040;

/// Copper K-beta transition energy (keV). Standard reference value; carried
/// with the line catalog for the simulator.
pub const CU_K_BETA_KEV: f64 = 8.905;

/// Energy of the Pauli-forbidden copper K-alpha transition (keV): the 2P->1S
/// cascade into an already doubly occupied 1S shell is shifted down from the
/// allowed line by the anomalous screening.
pub const CU_K_ALPHA_FORBIDDEN_KEV: f64 = 7.729;

/// Detector energy resolution used as the default response width: 320 eV
/// FWHM at 8 keV.
pub const REFERENCE_FWHM_KEV: f64 = 0.320;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} is outside its sanity window [{lo}, {hi}]")]
    OutOfBounds {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

/// The constants every pipeline shares. Immutable after construction and
/// safe to share across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Electron mass (keV).
    pub electron_mass_kev: f64,
    /// Nucleon (proton) mass (keV).
    pub nucleon_mass_kev: f64,
    /// Fine-structure constant e^2/(4 pi) in natural units.
    pub fine_structure: f64,
    /// hbar*c (keV*nm).
    pub hbar_c_kev_nm: f64,
    /// Elementary charge (C).
    pub elementary_charge_coulomb: f64,
    /// Avogadro's number (mol^-1).
    pub avogadro: f64,
}

impl PhysicalConstants {
    /// The pinned reference values (CODATA 2018).
    pub fn pinned() -> Self {
        Self::custom(
            510.998_950_00,
            938_272.088_16,
            7.297_352_569_3e-3,
            0.197_326_980_4,
            1.602_176_634e-19,
            6.022_140_76e23,
        )
        .expect("pinned constants satisfy their own sanity bounds")
    }

    /// Build a constants set from explicit values, enforcing the sanity
    /// bounds at construction.
    pub fn custom(
        electron_mass_kev: f64,
        nucleon_mass_kev: f64,
        fine_structure: f64,
        hbar_c_kev_nm: f64,
        elementary_charge_coulomb: f64,
        avogadro: f64,
    ) -> Result<Self, ConstantsError> {
        let c = Self {
            electron_mass_kev,
            nucleon_mass_kev,
            fine_structure,
            hbar_c_kev_nm,
            elementary_charge_coulomb,
            avogadro,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), ConstantsError> {
        let fields = [
            ("electron_mass_kev", self.electron_mass_kev),
            ("nucleon_mass_kev", self.nucleon_mass_kev),
            ("fine_structure", self.fine_structure),
            ("hbar_c_kev_nm", self.hbar_c_kev_nm),
            ("elementary_charge_coulomb", self.elementary_charge_coulomb),
            ("avogadro", self.avogadro),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ConstantsError::NonPositive { name, value });
            }
        }
        let windows = [
            ("fine_structure", self.fine_structure, 7.28e-3, 7.30e-3),
            ("electron_mass_kev", self.electron_mass_kev, 510.0, 512.0),
            (
                "nucleon_mass_kev",
                self.nucleon_mass_kev,
                937_272.0,
                939_272.0,
            ),
        ];
        for (name, value, lo, hi) in windows {
            if value < lo || value > hi {
                return Err(ConstantsError::OutOfBounds {
                    name,
                    value,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Convert a length in meters to an inverse energy in keV^-1 via hbar*c.
    pub fn length_to_inverse_kev(&self, length_m: f64) -> Result<f64, ConstantsError> {
        if !(length_m > 0.0) || !length_m.is_finite() {
            return Err(ConstantsError::NonPositive {
                name: "length_m",
                value: length_m,
            });
        }
        Ok(length_m / (self.hbar_c_kev_nm * 1e-9))
    }

    /// Inverse of [`length_to_inverse_kev`](Self::length_to_inverse_kev).
    pub fn inverse_kev_to_length(&self, inv_kev: f64) -> Result<f64, ConstantsError> {
        if !(inv_kev > 0.0) || !inv_kev.is_finite() {
            return Err(ConstantsError::NonPositive {
                name: "inv_kev",
                value: inv_kev,
            });
        }
        Ok(inv_kev * (self.hbar_c_kev_nm * 1e-9))
    }

    /// Squared electron-to-nucleon mass ratio, the suppression factor of the
    /// mass-proportional coupling.
    pub fn electron_to_nucleon_mass_sq(&self) -> f64 {
        let r = self.electron_mass_kev / self.nucleon_mass_kev;
        r * r
    }

    /// Squared nucleon-to-electron mass ratio.
    pub fn nucleon_to_electron_mass_sq(&self) -> f64 {
        1.0 / self.electron_to_nucleon_mass_sq()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::pinned()
    }
}

/// Convert a Gaussian FWHM (keV) to its sigma (keV).
pub fn fwhm_to_sigma(fwhm: f64) -> Result<f64, ConstantsError> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(ConstantsError::NonPositive {
            name: "fwhm",
            value: fwhm,
        });
    }
    Ok(fwhm / FWHM_OVER_SIGMA)
}

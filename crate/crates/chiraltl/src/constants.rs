//! Physical constants (CODATA 2018) and the fixed unit conversions used by
//! every other module. Internal unit system is strict SI; the only non-SI
//! quantities accepted anywhere are the user-facing config fields (Da, nm,
//! mm, and rotatory strengths in units of 1e-40 cgs).

use crate::error::{config_err, Result};
use std::f64::consts::PI;

/// Planck constant (J s, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Speed of light in vacuum (m/s, exact).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability (N/A^2).
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
/// Unified atomic mass unit (kg).
pub const DALTON: f64 = 1.660_539_066_60e-27;

/// Conversion factor from the cgs unit of rotatory strength (statC cm erg/G)
/// to its SI unit (C^2 m^3 / s).
///
/// Derivation: R = Im(d.m) is a product of an electric dipole matrix element
/// and a magnetic one. 1 statC = 1/(10 c) C with c the numeric SI speed of
/// light, so 1 statC cm = 1e-2 m / (10 c) C = 1e-3/c C m = 3.33564e-12 C m
/// (the familiar Debye scale times 1e18). 1 erg/G = 1e-7 J / 1e-4 T =
/// 1e-3 J/T. Hence 1 statC cm erg/G = 1e-6/c C^2 m^3/s = 3.33564e-15 SI.
pub const ROTATORY_CGS_TO_SI: f64 = 1.0e-6 / SPEED_OF_LIGHT;

/// Signed optical rotatory strength R_01 = Im(d_01 . m_10).
///
/// Positive sign means right-handed. Constructed either from SI values or
/// from the tabulated convention of 1e-40 cgs units; all downstream physics
/// consumes SI only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatoryStrength {
    si: f64,
}

impl RotatoryStrength {
    pub fn from_si(value_si: f64) -> Self {
        Self { si: value_si }
    }

    /// From the tabulated unit of 1e-40 statC cm erg/G.
    pub fn from_cgs_1e40(value: f64) -> Self {
        Self {
            si: cgs_rotatory_to_si(value),
        }
    }

    pub fn si(&self) -> f64 {
        self.si
    }

    pub fn cgs_1e40(&self) -> f64 {
        self.si / (1.0e-40 * ROTATORY_CGS_TO_SI)
    }

    pub fn is_right_handed(&self) -> bool {
        self.si > 0.0
    }
}

/// Convert a rotatory strength quoted in units of 1e-40 cgs to SI (C^2 m^3/s).
pub fn cgs_rotatory_to_si(r_cgs_1e40: f64) -> f64 {
    r_cgs_1e40 * 1.0e-40 * ROTATORY_CGS_TO_SI
}

/// de Broglie wavelength lambda = h / (m v_z).
pub fn de_broglie_wavelength(mass: f64, v_z: f64) -> Result<f64> {
    if !(mass > 0.0) || !mass.is_finite() {
        return config_err(format!("de Broglie wavelength requires mass > 0, got {mass}"));
    }
    if !(v_z > 0.0) || !v_z.is_finite() {
        return config_err(format!("de Broglie wavelength requires v_z > 0, got {v_z}"));
    }
    Ok(PLANCK / (mass * v_z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn maxwell_relation_holds() {
        let lhs = SPEED_OF_LIGHT * SPEED_OF_LIGHT * VACUUM_PERMITTIVITY * VACUUM_PERMEABILITY;
        assert!((lhs - 1.0).abs() < 1e-12, "c^2 eps0 mu0 = {lhs}");
    }

    #[test]
    fn rotatory_conversion_examples() {
        assert_eq!(cgs_rotatory_to_si(0.0), 0.0);
        // 700e-40 cgs (hexahelicene scale): oracle is the dimensional-analysis
        // chain in the doc comment, evaluated by hand:
        // 700e-40 * 1e-6 / 2.99792458e8 = 2.334948666e-52.
        assert_relative_eq!(
            cgs_rotatory_to_si(700.0),
            2.334948666387064e-52,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            cgs_rotatory_to_si(-700.0),
            -2.334948666387064e-52,
            max_relative = 1e-12
        );
        // headline constant matches the rounded value quoted in tables
        assert_relative_eq!(ROTATORY_CGS_TO_SI, 3.33564e-15, max_relative = 1e-5);
    }

    #[test]
    fn rotatory_round_trip() {
        for &r in &[700.0, -700.0, 1.0e-3, 5.0e3, 12345.678] {
            let rs = RotatoryStrength::from_cgs_1e40(r);
            assert_relative_eq!(rs.cgs_1e40(), r, max_relative = 1e-14);
        }
        assert!(RotatoryStrength::from_cgs_1e40(700.0).is_right_handed());
        assert!(!RotatoryStrength::from_cgs_1e40(-700.0).is_right_handed());
    }

    #[test]
    fn de_broglie_examples() {
        // hexahelicene, m = 328 Da at 180 m/s
        let lambda = de_broglie_wavelength(328.0 * DALTON, 180.0).unwrap();
        assert_relative_eq!(lambda, 6.758659746396337e-12, max_relative = 1e-12);
        // inverse proportionality in the mass
        let half = de_broglie_wavelength(2.0 * 328.0 * DALTON, 180.0).unwrap();
        assert_relative_eq!(half, lambda / 2.0, max_relative = 1e-14);
        // hypothetical 1000 Da molecule at 140 m/s
        let lambda2 = de_broglie_wavelength(1000.0 * DALTON, 140.0).unwrap();
        assert_relative_eq!(lambda2, 2.850223367337427e-12, max_relative = 1e-12);
    }

    #[test]
    fn de_broglie_domain_errors() {
        assert!(de_broglie_wavelength(0.0, 100.0).is_err());
        assert!(de_broglie_wavelength(-1.0e-25, 100.0).is_err());
        assert!(de_broglie_wavelength(1.0e-25, 0.0).is_err());
        assert!(de_broglie_wavelength(1.0e-25, -5.0).is_err());
    }
}

//! Value records describing molecules, gratings and the interferometer, and
//! the derivation of dipole matrix-element magnitudes from rotatory strength
//! and anisotropy factors.

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{config_err, Result};

/// A chiral molecule reduced to its dominant optical transition 0 -> 1.
///
/// `rotatory_strength` is the signed SI value R_01 (positive = right-handed).
/// The anisotropy factors are optional: for perfectly chiral mirror runs
/// only the rotatory strength matters, and with no factors given the
/// electric and magnetic couplings (hence the derived dipole magnitudes)
/// are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    /// Mass (kg).
    pub mass: f64,
    /// Dominant transition angular frequency omega_1 (rad/s).
    pub omega1: f64,
    /// Signed rotatory strength R_01 (C^2 m^3 / s).
    pub rotatory_strength: f64,
    /// Electric anisotropy factor g_e = |R_01/c| / |d_01|^2.
    pub g_e: Option<f64>,
    /// Magnetic anisotropy factor g_m = |R_01 c| / |m_01|^2.
    pub g_m: Option<f64>,
}

impl Molecule {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return config_err(format!("molecule mass must be > 0, got {}", self.mass));
        }
        if !(self.omega1 > 0.0) {
            return config_err(format!("omega1 must be > 0, got {}", self.omega1));
        }
        if !self.rotatory_strength.is_finite() {
            return config_err("rotatory strength must be finite");
        }
        for (name, g) in [("g_e", self.g_e), ("g_m", self.g_m)] {
            if let Some(g) = g {
                if !(g > 0.0) {
                    return config_err(format!("{name} must be > 0 when present, got {g}"));
                }
            }
        }
        Ok(())
    }

    /// |d_01|^2 = |R_01| / (c g_e) in C^2 m^2; zero without an electric
    /// anisotropy factor.
    pub fn d01_squared(&self) -> f64 {
        match self.g_e {
            Some(g_e) => self.rotatory_strength.abs() / (SPEED_OF_LIGHT * g_e),
            None => 0.0,
        }
    }

    /// |m_01|^2 = |R_01| c / g_m in (A m^2)^2; zero without a magnetic
    /// anisotropy factor.
    pub fn m01_squared(&self) -> f64 {
        match self.g_m {
            Some(g_m) => self.rotatory_strength.abs() * SPEED_OF_LIGHT / g_m,
            None => 0.0,
        }
    }

    /// The enantiomer: identical fields, opposite handedness.
    pub fn mirrored(&self) -> Self {
        Self {
            rotatory_strength: -self.rotatory_strength,
            ..self.clone()
        }
    }

    /// Longitudinal momentum at forward velocity v_z.
    pub fn momentum(&self, v_z: f64) -> f64 {
        self.mass * v_z
    }
}

/// Derived squared dipole matrix elements (|d_01|^2, |m_01|^2).
///
/// Unlike the lenient accessors on [`Molecule`], this operation demands both
/// anisotropy factors and rejects explicit zeros.
pub fn dipole_moments(mol: &Molecule) -> Result<(f64, f64)> {
    let g_e = mol
        .g_e
        .ok_or_else(|| crate::error::Error::Config("dipole_moments requires g_e".into()))?;
    let g_m = mol
        .g_m
        .ok_or_else(|| crate::error::Error::Config("dipole_moments requires g_m".into()))?;
    if g_e == 0.0 || g_m == 0.0 {
        return config_err("anisotropy factors must be nonzero");
    }
    Ok((
        mol.rotatory_strength.abs() / (SPEED_OF_LIGHT * g_e),
        mol.rotatory_strength.abs() * SPEED_OF_LIGHT / g_m,
    ))
}

/// Chiral-dominance condition r/r_c <= g_e, g_m for a chiral mirror.
///
/// A vanishing r_c cannot guarantee chiral dominance and reports false.
pub fn anisotropy_condition_ok(mol: &Molecule, r: f64, r_c: f64) -> bool {
    if r_c == 0.0 {
        return false;
    }
    let ratio = r / r_c;
    let ge_ok = mol.g_e.map_or(ratio <= 0.0, |g| ratio <= g);
    let gm_ok = mol.g_m.map_or(ratio <= 0.0, |g| ratio <= g);
    ge_ok && gm_ok
}

/// Drude-Lorentz style dielectric response of the grating substrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DielectricModel {
    /// Longitudinal resonance frequency (rad/s).
    pub omega_l: f64,
    /// Transverse resonance frequency (rad/s).
    pub omega_t: f64,
    /// Longitudinal damping (rad/s).
    pub gamma_l: f64,
    /// Transverse damping (rad/s).
    pub gamma_t: f64,
}

impl DielectricModel {
    /// Silicon nitride parameters used for all bare-grating runs.
    pub const SILICON_NITRIDE: DielectricModel = DielectricModel {
        omega_l: 2.69e16,
        omega_t: 1.33e16,
        gamma_l: 3.05e16,
        gamma_t: 6.40e15,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Omega_L", self.omega_l),
            ("Omega_T", self.omega_t),
            ("gamma_L", self.gamma_l),
            ("gamma_T", self.gamma_t),
        ] {
            if !(v > 0.0) {
                return config_err(format!("dielectric {name} must be > 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// Wall interaction models for a single grating face.
#[derive(Debug, Clone, PartialEq)]
pub enum WallModel {
    /// Idealized perfectly chiral mirror: r_c -> +-1, r -> 0, only the chiral
    /// Casimir-Polder term survives.
    PerfectChiral { r_c_sign: f64 },
    /// Chiral mirror with finite non-chiral reflectivity r and chiral
    /// reflectivity r_c; all three wall terms contribute.
    ChiralMirror { r: f64, r_c: f64 },
    /// Bare dielectric wall; electric CP attraction only.
    BareSiN { dielectric: DielectricModel },
    /// Dielectric wall carrying a chiral molecular coating of thickness `a`
    /// and number density `n_b`. Distances are measured to the bare surface.
    CoatedSiN {
        dielectric: DielectricModel,
        coating: Molecule,
        n_b: f64,
        a: f64,
    },
}

impl WallModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            WallModel::PerfectChiral { r_c_sign } => {
                if r_c_sign.abs() != 1.0 {
                    return config_err(format!("r_c_sign must be +-1, got {r_c_sign}"));
                }
            }
            WallModel::ChiralMirror { r, r_c } => {
                if r.abs() > 1.0 || r_c.abs() > 1.0 {
                    return config_err(format!("|r| <= 1 and |r_c| <= 1 required, got r={r}, r_c={r_c}"));
                }
            }
            WallModel::BareSiN { dielectric } => dielectric.validate()?,
            WallModel::CoatedSiN {
                dielectric,
                coating,
                n_b,
                a,
            } => {
                dielectric.validate()?;
                coating.validate()?;
                if !(*n_b > 0.0) {
                    return config_err(format!("coating number density must be > 0, got {n_b}"));
                }
                if !(*a > 0.0) {
                    return config_err(format!("coating thickness must be > 0, got {a}"));
                }
            }
        }
        Ok(())
    }

    /// Offset of the physically accessible region from the bare wall surface
    /// (the coating thickness for coated walls).
    pub fn contact_offset(&self) -> f64 {
        match self {
            WallModel::CoatedSiN { a, .. } => *a,
            _ => 0.0,
        }
    }

    /// The parity image of the wall: every chiral coupling flips sign.
    pub fn mirrored(&self) -> Self {
        match self {
            WallModel::PerfectChiral { r_c_sign } => WallModel::PerfectChiral {
                r_c_sign: -r_c_sign,
            },
            WallModel::ChiralMirror { r, r_c } => WallModel::ChiralMirror { r: *r, r_c: -r_c },
            WallModel::BareSiN { dielectric } => WallModel::BareSiN {
                dielectric: *dielectric,
            },
            WallModel::CoatedSiN {
                dielectric,
                coating,
                n_b,
                a,
            } => WallModel::CoatedSiN {
                dielectric: *dielectric,
                coating: coating.mirrored(),
                n_b: *n_b,
                a: *a,
            },
        }
    }
}

/// Cut-off criterion assigned to a grating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffRule {
    /// Deflection beyond the detector acceptance angle theta (G1, G2).
    Deflection { theta: f64 },
    /// Wall collision during the transit time through the grating (G3).
    FlyThrough,
}

/// Geometry and interaction model of one grating.
#[derive(Debug, Clone, PartialEq)]
pub struct GratingSpec {
    /// Period d (m).
    pub period_d: f64,
    /// Thickness b (m).
    pub thickness_b: f64,
    /// Open fraction f = s/d in (0, 1).
    pub open_fraction_f: f64,
    /// Coating thickness a (m) >= 0; must match the wall model.
    pub coating_thickness_a: f64,
    pub wall_model: WallModel,
    pub cutoff_rule: CutoffRule,
}

impl GratingSpec {
    /// Half slit width to the bare wall, x_o = f d / 2.
    pub fn half_open_x_o(&self) -> f64 {
        self.open_fraction_f * self.period_d / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period_d > 0.0) {
            return config_err(format!("grating period must be > 0, got {}", self.period_d));
        }
        if !(self.thickness_b > 0.0) {
            return config_err(format!(
                "grating thickness must be > 0, got {}",
                self.thickness_b
            ));
        }
        if !(self.open_fraction_f > 0.0 && self.open_fraction_f < 1.0) {
            return config_err(format!(
                "open_fraction must lie in (0,1), got {}",
                self.open_fraction_f
            ));
        }
        if self.coating_thickness_a < 0.0 {
            return config_err("coating thickness must be >= 0");
        }
        if (self.coating_thickness_a - self.wall_model.contact_offset()).abs() > 1e-15 {
            return config_err("coating_thickness_a must equal the wall model coating thickness");
        }
        if self.half_open_x_o() <= self.coating_thickness_a {
            return config_err(format!(
                "coating closes the slit: x_o = {:.3e} m <= a = {:.3e} m",
                self.half_open_x_o(),
                self.coating_thickness_a
            ));
        }
        self.wall_model.validate()?;
        if let CutoffRule::Deflection { theta } = self.cutoff_rule {
            if !(theta > 0.0) {
                return config_err(format!("deflection angle must be > 0, got {theta}"));
            }
        }
        Ok(())
    }
}

/// The full symmetric three-grating interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerConfig {
    pub g1: GratingSpec,
    pub g2: GratingSpec,
    pub g3: GratingSpec,
    /// Grating separation L (m).
    pub separation_l: f64,
    pub molecule: Molecule,
    /// Longitudinal velocity (m/s).
    pub v_z: f64,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        self.molecule.validate()?;
        self.g1.validate()?;
        self.g2.validate()?;
        self.g3.validate()?;
        if self.g1.period_d != self.g2.period_d || self.g2.period_d != self.g3.period_d {
            return config_err("symmetric setup requires equal grating periods");
        }
        if !(self.separation_l > 0.0) {
            return config_err(format!(
                "grating separation must be > 0, got {}",
                self.separation_l
            ));
        }
        if !(self.v_z > 0.0) {
            return config_err(format!("v_z must be > 0, got {}", self.v_z));
        }
        Ok(())
    }

    /// de Broglie wavelength of the molecule at the configured velocity.
    pub fn wavelength(&self) -> Result<f64> {
        crate::constants::de_broglie_wavelength(self.molecule.mass, self.v_z)
    }

    /// Talbot length L_lambda = d^2 / lambda.
    pub fn talbot_length(&self) -> Result<f64> {
        Ok(self.g1.period_d * self.g1.period_d / self.wavelength()?)
    }

    /// L / L_lambda, the Talbot parameter driving the B-coefficient phases.
    pub fn talbot_ratio(&self) -> Result<f64> {
        Ok(self.separation_l / self.talbot_length()?)
    }

    /// Full parity image: enantiomer molecule and mirrored walls everywhere.
    pub fn mirrored(&self) -> Self {
        let flip = |g: &GratingSpec| GratingSpec {
            wall_model: g.wall_model.mirrored(),
            ..g.clone()
        };
        Self {
            g1: flip(&self.g1),
            g2: flip(&self.g2),
            g3: flip(&self.g3),
            separation_l: self.separation_l,
            molecule: self.molecule.mirrored(),
            v_z: self.v_z,
        }
    }

    /// Same interferometer at a different velocity.
    pub fn with_velocity(&self, v_z: f64) -> Self {
        Self {
            v_z,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{cgs_rotatory_to_si, DALTON, SPEED_OF_LIGHT};
    use approx::assert_relative_eq;

    fn fig3i_molecule() -> Molecule {
        Molecule {
            mass: 1000.0 * DALTON,
            omega1: 2.0 * std::f64::consts::PI * 1.0e15,
            rotatory_strength: cgs_rotatory_to_si(1000.0),
            g_e: Some(0.2),
            g_m: Some(5.0),
        }
    }

    #[test]
    fn dipole_moments_examples() {
        let mut mol = fig3i_molecule();
        // zero rotatory strength gives zero moments
        mol.rotatory_strength = 0.0;
        let (d2, m2) = dipole_moments(&mol).unwrap();
        assert_eq!((d2, m2), (0.0, 0.0));

        // fig3i preset parameters, derived by direct formula evaluation
        let mol = fig3i_molecule();
        let (d2, m2) = dipole_moments(&mol).unwrap();
        let r = cgs_rotatory_to_si(1000.0);
        assert_relative_eq!(d2, r / (SPEED_OF_LIGHT * 0.2), max_relative = 1e-14);
        assert_relative_eq!(m2, r * SPEED_OF_LIGHT / 5.0, max_relative = 1e-14);

        // linear scaling in R_01
        let mut doubled = fig3i_molecule();
        doubled.rotatory_strength *= 2.0;
        let (d2b, m2b) = dipole_moments(&doubled).unwrap();
        assert_relative_eq!(d2b, 2.0 * d2, max_relative = 1e-14);
        assert_relative_eq!(m2b, 2.0 * m2, max_relative = 1e-14);
    }

    #[test]
    fn dipole_moments_requires_nonzero_g() {
        let mut mol = fig3i_molecule();
        mol.g_e = None;
        assert!(dipole_moments(&mol).is_err());
    }

    #[test]
    fn enantiomers_share_dipole_magnitudes() {
        let mol = fig3i_molecule();
        let mir = mol.mirrored();
        assert_eq!(mol.d01_squared(), mir.d01_squared());
        assert_eq!(mol.m01_squared(), mir.m01_squared());
        assert_eq!(mir.rotatory_strength, -mol.rotatory_strength);
    }

    #[test]
    fn anisotropy_condition_examples() {
        let mol = fig3i_molecule();
        assert!(anisotropy_condition_ok(&mol, 0.0, 1.0));
        assert!(!anisotropy_condition_ok(&mol, 0.5, 1.0)); // 0.5 > g_e = 0.2
        assert!(anisotropy_condition_ok(&mol, 0.1, 1.0)); // 0.1 <= 0.2 and <= 5
        assert!(!anisotropy_condition_ok(&mol, 0.1, 0.0)); // degenerate r_c
    }

    #[test]
    fn grating_validation_rejects_closed_slit() {
        let mol = fig3i_molecule();
        let g = GratingSpec {
            period_d: 80.0e-9,
            thickness_b: 160.0e-9,
            open_fraction_f: 0.45,
            coating_thickness_a: 20.0e-9, // x_o = 18 nm < a
            wall_model: WallModel::CoatedSiN {
                dielectric: DielectricModel::SILICON_NITRIDE,
                coating: mol,
                n_b: 5.0e28,
                a: 20.0e-9,
            },
            cutoff_rule: CutoffRule::Deflection { theta: 2.0e-3 },
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn talbot_ratio_matches_hexahelicene_geometry() {
        // d = 257 nm, L = 50 mm, hexahelicene at 180 m/s gives L/L_T ~ 5.12
        let mol = Molecule {
            mass: 328.0 * DALTON,
            omega1: 2.0 * std::f64::consts::PI * 1.0e15,
            rotatory_strength: cgs_rotatory_to_si(700.0),
            g_e: None,
            g_m: None,
        };
        let g = GratingSpec {
            period_d: 257.0e-9,
            thickness_b: 160.0e-9,
            open_fraction_f: 0.45,
            coating_thickness_a: 0.0,
            wall_model: WallModel::PerfectChiral { r_c_sign: 1.0 },
            cutoff_rule: CutoffRule::Deflection { theta: 2.0e-3 },
        };
        let cfg = InterferometerConfig {
            g1: g.clone(),
            g2: g.clone(),
            g3: g,
            separation_l: 50.0e-3,
            molecule: mol,
            v_z: 180.0,
        };
        let lt = cfg.talbot_length().unwrap();
        assert_relative_eq!(lt, 9.772e-3, max_relative = 1e-3);
        assert_relative_eq!(cfg.talbot_ratio().unwrap(), 5.1166, max_relative = 1e-3);
    }
}

//! Run configuration schema (TOML) and its mapping onto the domain model.
//! Field names are normative; unknown keys are rejected and every physical
//! invariant is re-checked at load time.

use crate::constants::{cgs_rotatory_to_si, DALTON};
use crate::domain::{
    CutoffRule, DielectricModel, GratingSpec, InterferometerConfig, Molecule, WallModel,
};
use crate::error::{config_err, Error, Result};
use crate::oracle::{OracleOptions, WaveGrid};
use crate::scenarios::{Geometry, Scenario, SweepGrid};
use crate::talbot::{SignalOptions, X3Grid};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioField,
    pub molecule: MoleculeConfig,
    pub geometry: GeometryConfig,
    pub run: RunSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
    /// Per-grating wall choices, required for scenario = "custom".
    #[serde(default)]
    pub walls: Option<WallsSection>,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioField {
    PerfectChiralG2,
    CoatedG2,
    AllCoated,
    Custom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeConfig {
    pub mass_da: f64,
    pub omega1_rad_s: f64,
    #[serde(rename = "R01_cgs_1e40")]
    pub r01_cgs_1e40: f64,
    #[serde(default)]
    pub g_e: Option<f64>,
    #[serde(default)]
    pub g_m: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub d_nm: f64,
    pub b_nm: f64,
    #[serde(rename = "L_mm")]
    pub l_mm: f64,
    pub f: f64,
    #[serde(default)]
    pub a_nm: f64,
    #[serde(rename = "n_B_per_m3", default)]
    pub n_b_per_m3: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub v_z_mps: Option<f64>,
    #[serde(default)]
    pub v_range: Option<VRange>,
    #[serde(default = "default_x3_samples")]
    pub x3_samples: usize,
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default = "default_theta1")]
    pub theta1_mrad: f64,
    #[serde(default = "default_theta2")]
    pub theta2_mrad: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_x3_samples() -> usize {
    512
}
fn default_l_max() -> usize {
    64
}
fn default_theta1() -> f64 {
    1.0
}
fn default_theta2() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VRange {
    pub min: f64,
    pub max: f64,
    pub bin: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_quad_rel")]
    pub quad_rel: f64,
    #[serde(default = "default_quad_abs")]
    pub quad_abs: f64,
    #[serde(default = "default_tail_rel")]
    pub tail_rel: f64,
    #[serde(default = "default_phase_cap")]
    pub phase_cap: f64,
}

fn default_quad_rel() -> f64 {
    1e-8
}
fn default_quad_abs() -> f64 {
    1e-11
}
fn default_tail_rel() -> f64 {
    1e-7
}
fn default_phase_cap() -> f64 {
    200.0
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: default_quad_rel(),
            quad_abs: default_quad_abs(),
            tail_rel: default_tail_rel(),
            phase_cap: default_phase_cap(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_r_min")]
    pub r_min_cgs_1e40: f64,
    #[serde(default = "default_r_max")]
    pub r_max_cgs_1e40: f64,
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_g_min")]
    pub g_e_min: f64,
    #[serde(default = "default_g_max")]
    pub g_e_max: f64,
    #[serde(default = "default_n_g")]
    pub n_g_e: usize,
}

fn default_r_min() -> f64 {
    100.0
}
fn default_r_max() -> f64 {
    10_000.0
}
fn default_n_r() -> usize {
    21
}
fn default_g_min() -> f64 {
    0.1
}
fn default_g_max() -> f64 {
    0.5
}
fn default_n_g() -> usize {
    17
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            r_min_cgs_1e40: default_r_min(),
            r_max_cgs_1e40: default_r_max(),
            n_r: default_n_r(),
            g_e_min: default_g_min(),
            g_e_max: default_g_max(),
            n_g_e: default_n_g(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_n_periods")]
    pub n_periods: usize,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    /// 0 = automatic choice from the Talbot ratio.
    #[serde(default)]
    pub n_modes: usize,
    #[serde(default = "default_true")]
    pub convergence_check: bool,
}

fn default_n_periods() -> usize {
    32
}
fn default_n_samples() -> usize {
    1 << 15
}
fn default_true() -> bool {
    true
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            n_periods: default_n_periods(),
            n_samples: default_n_samples(),
            n_modes: 0,
            convergence_check: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallsSection {
    pub g1: WallConfig,
    pub g2: WallConfig,
    pub g3: WallConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WallConfig {
    BareSin,
    CoatedSin,
    PerfectChiral { r_c_sign: f64 },
    ChiralMirror { r: f64, r_c: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("config parse failure: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.molecule()?.validate()?;
        let geom = self.geometry()?;
        if !(geom.open_fraction_f > 0.0 && geom.open_fraction_f < 1.0) {
            return config_err(format!(
                "open_fraction must lie in (0,1), got {}",
                geom.open_fraction_f
            ));
        }
        if self.scenario == ScenarioField::Custom && self.walls.is_none() {
            return config_err("scenario = \"custom\" requires a [walls] section");
        }
        if let Some(v) = &self.run.v_range {
            crate::scenarios::velocity_bins(v.min, v.max, v.bin)?;
        }
        // full structural check of the assembled interferometer
        let probe_v = self
            .run
            .v_z_mps
            .or_else(|| self.run.v_range.map(|r| r.min))
            .unwrap_or(100.0);
        self.build_pair(probe_v)?;
        Ok(())
    }

    pub fn molecule(&self) -> Result<Molecule> {
        let m = &self.molecule;
        if !(m.mass_da > 0.0) {
            return config_err(format!("mass_da must be > 0, got {}", m.mass_da));
        }
        let mol = Molecule {
            mass: m.mass_da * DALTON,
            omega1: m.omega1_rad_s,
            rotatory_strength: cgs_rotatory_to_si(m.r01_cgs_1e40),
            g_e: m.g_e,
            g_m: m.g_m,
        };
        mol.validate()?;
        Ok(mol)
    }

    pub fn geometry(&self) -> Result<Geometry> {
        let g = &self.geometry;
        Ok(Geometry {
            period_d: g.d_nm * 1e-9,
            thickness_b: g.b_nm * 1e-9,
            separation_l: g.l_mm * 1e-3,
            open_fraction_f: g.f,
            coating_a: g.a_nm * 1e-9,
            n_b: g.n_b_per_m3.unwrap_or(5.0e28),
            theta_g1: self.run.theta1_mrad * 1e-3,
            theta_g2: self.run.theta2_mrad * 1e-3,
        })
    }

    pub fn signal_options(&self) -> SignalOptions {
        let t = &self.run.tolerances;
        SignalOptions {
            l_max: self.run.l_max,
            x3_grid: X3Grid::PeriodSamples(self.run.x3_samples),
            tail_rel: t.tail_rel,
            quad_abs_tol: t.quad_abs,
            quad_rel_tol: t.quad_rel,
            phase_cap: t.phase_cap,
            ..SignalOptions::default()
        }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        let o = self.oracle.unwrap_or_default();
        OracleOptions {
            grid: WaveGrid {
                n_periods: o.n_periods,
                n_samples: o.n_samples,
            },
            n_modes: o.n_modes,
            propagation_phase: true,
            phase_cap: self.run.tolerances.phase_cap,
            x3_samples: self.run.x3_samples,
        }
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid> {
        let s = self.sweep.unwrap_or_default();
        let v = self.run.v_range.ok_or_else(|| {
            Error::Config("sweep requires a [run.v_range] section".into())
        })?;
        let mut grid = SweepGrid::log_linear(
            s.r_min_cgs_1e40,
            s.r_max_cgs_1e40,
            s.n_r,
            s.g_e_min,
            s.g_e_max,
            s.n_g_e,
        );
        grid.v_min = v.min;
        grid.v_max = v.max;
        grid.v_bin = v.bin;
        grid.validate()?;
        Ok(grid)
    }

    fn custom_wall(&self, which: &WallConfig, geom: &Geometry) -> Result<(WallModel, f64)> {
        let mol = self.molecule()?;
        let sin = DielectricModel::SILICON_NITRIDE;
        Ok(match which {
            WallConfig::BareSin => (WallModel::BareSiN { dielectric: sin }, 0.0),
            WallConfig::CoatedSin => (
                WallModel::CoatedSiN {
                    dielectric: sin,
                    coating: Molecule {
                        rotatory_strength: mol.rotatory_strength.abs(),
                        ..mol
                    },
                    n_b: geom.n_b,
                    a: geom.coating_a,
                },
                geom.coating_a,
            ),
            WallConfig::PerfectChiral { r_c_sign } => (
                WallModel::PerfectChiral {
                    r_c_sign: *r_c_sign,
                },
                0.0,
            ),
            WallConfig::ChiralMirror { r, r_c } => {
                (WallModel::ChiralMirror { r: *r, r_c: *r_c }, 0.0)
            }
        })
    }

    /// The enantiomer pair (left, right) at the given velocity.
    pub fn build_pair(&self, v_z: f64) -> Result<(InterferometerConfig, InterferometerConfig)> {
        let geom = self.geometry()?;
        let mol = self.molecule()?;
        let right_mol = Molecule {
            rotatory_strength: mol.rotatory_strength.abs(),
            ..mol.clone()
        };
        match self.scenario {
            ScenarioField::PerfectChiralG2 => {
                crate::scenarios::scenario_pair(Scenario::PerfectChiralG2, &right_mol, &geom, v_z)
            }
            ScenarioField::CoatedG2 => {
                crate::scenarios::scenario_pair(Scenario::CoatedG2, &right_mol, &geom, v_z)
            }
            ScenarioField::AllCoated => {
                crate::scenarios::scenario_pair(Scenario::AllCoated, &right_mol, &geom, v_z)
            }
            ScenarioField::Custom => {
                let walls = self
                    .walls
                    .as_ref()
                    .ok_or_else(|| Error::Config("custom scenario needs [walls]".into()))?;
                let (w1, a1) = self.custom_wall(&walls.g1, &geom)?;
                let (w2, a2) = self.custom_wall(&walls.g2, &geom)?;
                let (w3, a3) = self.custom_wall(&walls.g3, &geom)?;
                let spec = |wall: WallModel, a: f64, rule: CutoffRule| GratingSpec {
                    period_d: geom.period_d,
                    thickness_b: geom.thickness_b,
                    open_fraction_f: geom.open_fraction_f,
                    coating_thickness_a: a,
                    wall_model: wall,
                    cutoff_rule: rule,
                };
                let right = InterferometerConfig {
                    g1: spec(
                        w1,
                        a1,
                        CutoffRule::Deflection {
                            theta: geom.theta_g1,
                        },
                    ),
                    g2: spec(
                        w2,
                        a2,
                        CutoffRule::Deflection {
                            theta: geom.theta_g2,
                        },
                    ),
                    g3: spec(w3, a3, CutoffRule::FlyThrough),
                    separation_l: geom.separation_l,
                    molecule: right_mol,
                    v_z,
                };
                right.validate()?;
                let left = InterferometerConfig {
                    molecule: right.molecule.mirrored(),
                    ..right.clone()
                };
                Ok((left, right))
            }
        }
    }

    /// The configured molecule with its sign as given (for single-sided runs
    /// such as the oracle check).
    pub fn build_single(&self, v_z: f64) -> Result<InterferometerConfig> {
        let (left, right) = self.build_pair(v_z)?;
        if self.molecule.r01_cgs_1e40 < 0.0 {
            Ok(left)
        } else {
            Ok(right)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
scenario = "perfect_chiral_g2"
[molecule]
mass_da = 328.0
omega1_rad_s = 6.283185307179586e15
R01_cgs_1e40 = 700.0
[geometry]
d_nm = 257.0
b_nm = 160.0
L_mm = 50.0
f = 0.45
[run]
v_z_mps = 180.0
[output]
dir = "out"
"#;

    #[test]
    fn minimal_config_parses_and_builds() {
        let cfg: RunConfig = toml::from_str(MINIMAL).unwrap();
        cfg.validate().unwrap();
        let (left, right) = cfg.build_pair(180.0).unwrap();
        assert!(right.molecule.rotatory_strength > 0.0);
        assert!(left.molecule.rotatory_strength < 0.0);
        approx::assert_relative_eq!(right.g1.period_d, 257.0e-9, max_relative = 1e-15);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = MINIMAL.replace("[output]", "unknown_key = 3\n[output]");
        let parsed: std::result::Result<RunConfig, _> = toml::from_str(&bad);
        assert!(parsed.is_err());
    }

    #[test]
    fn open_fraction_out_of_range_names_the_field() {
        let bad = MINIMAL.replace("f = 0.45", "f = 1.2");
        let cfg: RunConfig = toml::from_str(&bad).unwrap();
        let err = cfg.validate().unwrap_err();
        let msg = format!("{err}");
        assert!(
            msg.starts_with("ERROR config: open_fraction"),
            "diagnostic was: {msg}"
        );
    }

    #[test]
    fn custom_scenario_requires_walls() {
        let bad = MINIMAL.replace(
            "scenario = \"perfect_chiral_g2\"",
            "scenario = \"custom\"",
        );
        let cfg: RunConfig = toml::from_str(&bad).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn custom_scenario_with_walls_builds() {
        let custom = MINIMAL
            .replace(
                "scenario = \"perfect_chiral_g2\"",
                "scenario = \"custom\"\n\n[walls]\ng1 = { type = \"bare_sin\" }\ng2 = { type = \"chiral_mirror\", r = 0.1, r_c = 0.9 }\ng3 = { type = \"bare_sin\" }",
            )
            .replace("R01_cgs_1e40 = 700.0", "R01_cgs_1e40 = 700.0\ng_e = 0.2\ng_m = 5.0");
        let cfg: RunConfig = toml::from_str(&custom).unwrap();
        cfg.validate().unwrap();
        let (_, right) = cfg.build_pair(180.0).unwrap();
        assert!(matches!(
            right.g2.wall_model,
            crate::domain::WallModel::ChiralMirror { .. }
        ));
    }
}

//! Pre-packaged interferometer scenarios (perfectly chiral G2, chiral-coated
//! G2, all gratings coated), enantiomer pairs, velocity-bin averaging and the
//! enantiomer-difference metrics Delta S and Delta V_max, plus the
//! (R_01, g_e) sweep engine.

use crate::constants::cgs_rotatory_to_si;
use crate::domain::{
    CutoffRule, DielectricModel, GratingSpec, InterferometerConfig, Molecule, WallModel,
};
use crate::error::{config_err, Result};
use crate::quad::gauss_legendre;
use crate::talbot::{
    sample_harmonics, signal_harmonics, visibility_from_harmonics, FringeResult, SignalOptions,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// The three grating dressings studied for the symmetric interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// G1/G3 bare SiN, G2 written into a perfectly right-handed chiral
    /// material.
    PerfectChiralG2,
    /// G1/G3 bare SiN, G2 coated with right-handed chiral molecules.
    CoatedG2,
    /// All three gratings coated with right-handed chiral molecules.
    AllCoated,
}

/// Shared geometric and material parameters of a scenario.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub period_d: f64,
    pub thickness_b: f64,
    pub separation_l: f64,
    pub open_fraction_f: f64,
    /// Coating thickness (used by the coated scenarios).
    pub coating_a: f64,
    /// Coating number density (1/m^3).
    pub n_b: f64,
    /// Deflection acceptance angles at G1 and G2 (rad).
    pub theta_g1: f64,
    pub theta_g2: f64,
}

impl Geometry {
    /// Geometry of the fig2 presets: d = 257 nm, b = 160 nm, L = 50 mm,
    /// f = 0.45.
    pub fn fig2() -> Self {
        Self {
            period_d: 257.0e-9,
            thickness_b: 160.0e-9,
            separation_l: 50.0e-3,
            open_fraction_f: 0.45,
            coating_a: 0.0,
            n_b: 5.0e28,
            theta_g1: 1.0e-3,
            theta_g2: 2.0e-3,
        }
    }

    /// Geometry of the fig3/fig4/fig5 presets: d = 80 nm, b = 160 nm,
    /// L = 10 mm, f = 0.45, a = 10 nm, n_B = 5e28 m^-3.
    pub fn fig34() -> Self {
        Self {
            period_d: 80.0e-9,
            thickness_b: 160.0e-9,
            separation_l: 10.0e-3,
            open_fraction_f: 0.45,
            coating_a: 10.0e-9,
            n_b: 5.0e28,
            theta_g1: 1.0e-3,
            theta_g2: 2.0e-3,
        }
    }
}

fn grating(geom: &Geometry, wall: WallModel, rule: CutoffRule, coated: bool) -> GratingSpec {
    GratingSpec {
        period_d: geom.period_d,
        thickness_b: geom.thickness_b,
        open_fraction_f: geom.open_fraction_f,
        coating_thickness_a: if coated { geom.coating_a } else { 0.0 },
        wall_model: wall,
        cutoff_rule: rule,
    }
}

/// Build one enantiomer's interferometer for a scenario. The coating is
/// always right-handed with |R_01| of the travelling molecule and its
/// anisotropy factors.
pub fn build_config(
    scenario: Scenario,
    molecule: &Molecule,
    geom: &Geometry,
    v_z: f64,
) -> Result<InterferometerConfig> {
    molecule.validate()?;
    let sin = DielectricModel::SILICON_NITRIDE;
    let coating = Molecule {
        rotatory_strength: molecule.rotatory_strength.abs(),
        ..molecule.clone()
    };
    let bare = WallModel::BareSiN { dielectric: sin };
    let coated = WallModel::CoatedSiN {
        dielectric: sin,
        coating,
        n_b: geom.n_b,
        a: geom.coating_a,
    };
    let rule1 = CutoffRule::Deflection {
        theta: geom.theta_g1,
    };
    let rule2 = CutoffRule::Deflection {
        theta: geom.theta_g2,
    };
    let (g1, g2, g3) = match scenario {
        Scenario::PerfectChiralG2 => (
            grating(geom, bare.clone(), rule1, false),
            grating(
                geom,
                WallModel::PerfectChiral { r_c_sign: 1.0 },
                rule2,
                false,
            ),
            grating(geom, bare, CutoffRule::FlyThrough, false),
        ),
        Scenario::CoatedG2 => (
            grating(geom, bare.clone(), rule1, false),
            grating(geom, coated, rule2, true),
            grating(geom, bare, CutoffRule::FlyThrough, false),
        ),
        Scenario::AllCoated => (
            grating(geom, coated.clone(), rule1, true),
            grating(geom, coated.clone(), rule2, true),
            grating(geom, coated, CutoffRule::FlyThrough, true),
        ),
    };
    let cfg = InterferometerConfig {
        g1,
        g2,
        g3,
        separation_l: geom.separation_l,
        molecule: molecule.clone(),
        v_z,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// The enantiomer pair (left-handed run, right-handed run): identical except
/// for the sign of the travelling molecule's rotatory strength.
pub fn scenario_pair(
    scenario: Scenario,
    molecule_right: &Molecule,
    geom: &Geometry,
    v_z: f64,
) -> Result<(InterferometerConfig, InterferometerConfig)> {
    if molecule_right.rotatory_strength < 0.0 {
        return config_err("scenario_pair expects the right-handed (R_01 >= 0) molecule");
    }
    let right = build_config(scenario, molecule_right, geom, v_z)?;
    let left = InterferometerConfig {
        molecule: molecule_right.mirrored(),
        ..right.clone()
    };
    Ok((left, right))
}

/// Mean relative transmission difference
/// Delta S = (1/4fd) int_{-2fd}^{2fd} (S_L - S_R)/S_L dx_3
/// on the shared sample grid of two fringes (trapezoidal rule).
pub fn delta_s(fringe_l: &FringeResult, fringe_r: &FringeResult, f: f64, d: f64) -> Result<f64> {
    if fringe_l.x3.len() != fringe_r.x3.len()
        || fringe_l
            .x3
            .iter()
            .zip(&fringe_r.x3)
            .any(|(a, b)| (a - b).abs() > 1e-15 * d)
    {
        return config_err("delta_s requires both fringes on an identical x3 grid");
    }
    let span = 2.0 * f * d;
    let x = &fringe_l.x3;
    if x[0] > -span + 1e-12 * d || x[x.len() - 1] < span - 1e-12 * d {
        return config_err("delta_s grid must cover [-2fd, 2fd]");
    }
    integrate_delta(&fringe_l.s, &fringe_r.s, x, f, d)
}

fn integrate_delta(s_l: &[f64], s_r: &[f64], x: &[f64], f: f64, d: f64) -> Result<f64> {
    if let Some(bad) = s_l.iter().find(|&&v| v <= 0.0) {
        return crate::error::numerical_err(format!(
            "delta_s: S_L non-positive ({bad:.3e}); truncation artefact"
        ));
    }
    let rel: Vec<f64> = s_l
        .iter()
        .zip(s_r)
        .map(|(l, r)| (l - r) / l)
        .collect();
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (rel[i] + rel[i - 1]) * (x[i] - x[i - 1]);
    }
    Ok(acc / (4.0 * f * d))
}

/// Delta S evaluated from two harmonic sets on a fresh [-2fd, 2fd] grid.
pub fn delta_s_from_harmonics(
    h_l: &[Complex64],
    h_r: &[Complex64],
    d: f64,
    f: f64,
) -> Result<f64> {
    let span = 2.0 * f * d;
    let n = ((4.0 * f * 512.0).ceil() as usize).max(64) + 1;
    let x: Vec<f64> = (0..n)
        .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
        .collect();
    let s_l = sample_harmonics(h_l, d, &x);
    let s_r = sample_harmonics(h_r, d, &x);
    integrate_delta(&s_l, &s_r, &x, f, d)
}

/// One velocity bin of the experimentally binned curves.
#[derive(Debug, Clone, Copy)]
pub struct VelocityBin {
    pub lo: f64,
    pub hi: f64,
}

impl VelocityBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Tile [v_min, v_max] with bins of width `bin`; the bins must tile exactly.
pub fn velocity_bins(v_min: f64, v_max: f64, bin: f64) -> Result<Vec<VelocityBin>> {
    if !(v_min > 0.0 && v_max > v_min && bin > 0.0) {
        return config_err(format!(
            "invalid velocity range {v_min}..{v_max} with bin {bin}"
        ));
    }
    let n = ((v_max - v_min) / bin).round() as usize;
    if n == 0 || ((v_max - v_min) - n as f64 * bin).abs() > 1e-9 * bin {
        return config_err(format!(
            "bins of width {bin} do not tile the range {v_min}..{v_max} exactly"
        ));
    }
    Ok((0..n)
        .map(|i| VelocityBin {
            lo: v_min + i as f64 * bin,
            hi: v_min + (i + 1) as f64 * bin,
        })
        .collect())
}

/// Bin-averaged enantiomer observables at one velocity bin.
#[derive(Debug, Clone)]
pub struct BinnedPoint {
    pub v_center: f64,
    pub vis_left: f64,
    pub vis_right: f64,
    pub delta_s: f64,
}

/// Number of Gauss-Legendre nodes for the uniform average over each bin.
pub const BIN_AVERAGE_NODES: usize = 11;

fn averaged_harmonics(
    cfg: &InterferometerConfig,
    bin: &VelocityBin,
    opts: &SignalOptions,
) -> Result<Vec<Complex64>> {
    let (nodes, weights) = gauss_legendre(BIN_AVERAGE_NODES);
    let mid = bin.center();
    let half = 0.5 * (bin.hi - bin.lo);
    let mut acc: Vec<Complex64> = Vec::new();
    for (x, w) in nodes.iter().zip(weights) {
        let v = mid + half * x;
        let h = signal_harmonics(&cfg.with_velocity(v), opts)?;
        if h.harmonics.len() > acc.len() {
            acc.resize(h.harmonics.len(), Complex64::new(0.0, 0.0));
        }
        // uniform average over the bin: GL weights sum to 2
        for (a, c) in acc.iter_mut().zip(&h.harmonics) {
            *a += c * (w / 2.0);
        }
    }
    Ok(acc)
}

/// Bin-averaged visibility and Delta S curves for an enantiomer pair.
/// Signals (equivalently, their harmonics) are averaged over each bin before
/// the visibility is extracted; experiments average counts, not contrasts.
pub fn binned_pair_curve(
    left: &InterferometerConfig,
    right: &InterferometerConfig,
    bins: &[VelocityBin],
    open_fraction_f: f64,
    opts: &SignalOptions,
) -> Result<Vec<BinnedPoint>> {
    let d = right.g1.period_d;
    bins.par_iter()
        .map(|bin| {
            let h_l = averaged_harmonics(left, bin, opts)?;
            let h_r = averaged_harmonics(right, bin, opts)?;
            Ok(BinnedPoint {
                v_center: bin.center(),
                vis_left: visibility_from_harmonics(&h_l)?,
                vis_right: visibility_from_harmonics(&h_r)?,
                delta_s: delta_s_from_harmonics(&h_l, &h_r, d, open_fraction_f)?,
            })
        })
        .collect()
}

/// Maximum absolute visibility difference across the binned curve.
pub fn delta_v_max(curve: &[BinnedPoint]) -> f64 {
    curve
        .iter()
        .map(|p| (p.vis_left - p.vis_right).abs())
        .fold(0.0, f64::max)
}

/// Maximum bin-averaged Delta S across the curve.
pub fn delta_s_max(curve: &[BinnedPoint]) -> f64 {
    curve.iter().map(|p| p.delta_s).fold(f64::NEG_INFINITY, f64::max)
}

/// The (rotatory strength, electric anisotropy) sweep grid.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    /// Rotatory strengths in units of 1e-40 cgs, strictly increasing
    /// (log-spaced by default).
    pub r_values_cgs_1e40: Vec<f64>,
    /// Electric anisotropy factors, strictly increasing.
    pub g_e_values: Vec<f64>,
    pub v_min: f64,
    pub v_max: f64,
    pub v_bin: f64,
}

impl SweepGrid {
    /// 21 log-spaced rotatory strengths across 1e-38..1e-36 cgs and 17
    /// anisotropy factors across 0.1..0.5, velocities 100..200 m/s binned
    /// at 10 m/s.
    pub fn default_paper() -> Self {
        Self::log_linear(100.0, 10_000.0, 21, 0.1, 0.5, 17)
    }

    pub fn log_linear(
        r_lo_cgs_1e40: f64,
        r_hi_cgs_1e40: f64,
        n_r: usize,
        g_lo: f64,
        g_hi: f64,
        n_g: usize,
    ) -> Self {
        let r_values_cgs_1e40 = (0..n_r)
            .map(|i| {
                if i == 0 {
                    r_lo_cgs_1e40
                } else if i == n_r - 1 {
                    r_hi_cgs_1e40
                } else {
                    let t = i as f64 / (n_r - 1) as f64;
                    (r_lo_cgs_1e40.ln() + t * (r_hi_cgs_1e40 / r_lo_cgs_1e40).ln()).exp()
                }
            })
            .collect();
        let g_e_values = (0..n_g)
            .map(|i| {
                if i == 0 {
                    g_lo
                } else if i == n_g - 1 {
                    g_hi
                } else {
                    let t = i as f64 / (n_g - 1) as f64;
                    g_lo + t * (g_hi - g_lo)
                }
            })
            .collect();
        Self {
            r_values_cgs_1e40,
            g_e_values,
            v_min: 100.0,
            v_max: 200.0,
            v_bin: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_values_cgs_1e40.windows(2).any(|w| w[1] <= w[0])
            || self.g_e_values.windows(2).any(|w| w[1] <= w[0])
        {
            return config_err("sweep grids must be strictly increasing");
        }
        if self.r_values_cgs_1e40.is_empty() || self.g_e_values.is_empty() {
            return config_err("sweep grids must be non-empty");
        }
        velocity_bins(self.v_min, self.v_max, self.v_bin)?;
        Ok(())
    }
}

/// One evaluated sweep cell; failures are recorded, they do not abort the
/// sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub r_cgs_1e40: f64,
    pub g_e: f64,
    pub delta_s: f64,
    pub delta_v_max: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Row-major: rotatory strength outer, anisotropy inner.
    pub cells: Vec<SweepCell>,
}

/// Evaluate one sweep cell: the AllCoated enantiomer pair for the given
/// molecular parameters, binned over the velocity range. Delta S is reported
/// as its maximum over bins, mirroring the Delta V_max procedure.
pub fn sweep_cell(
    r_cgs_1e40: f64,
    g_e: f64,
    template: &Molecule,
    geom: &Geometry,
    grid: &SweepGrid,
    opts: &SignalOptions,
) -> Result<(f64, f64)> {
    let molecule = Molecule {
        rotatory_strength: cgs_rotatory_to_si(r_cgs_1e40),
        g_e: Some(g_e),
        ..template.clone()
    };
    let (left, right) = scenario_pair(Scenario::AllCoated, &molecule, geom, grid.v_min)?;
    let bins = velocity_bins(grid.v_min, grid.v_max, grid.v_bin)?;
    let curve = binned_pair_curve(&left, &right, &bins, geom.open_fraction_f, opts)?;
    Ok((delta_s_max(&curve), delta_v_max(&curve)))
}

/// Run the full sweep, fanning cells out over the worker pool. Output order
/// and values are independent of the worker count.
pub fn run_sweep(
    grid: &SweepGrid,
    template: &Molecule,
    geom: &Geometry,
    opts: &SignalOptions,
) -> Result<SweepResult> {
    grid.validate()?;
    let points: Vec<(f64, f64)> = grid
        .r_values_cgs_1e40
        .iter()
        .flat_map(|&r| grid.g_e_values.iter().map(move |&g| (r, g)))
        .collect();
    let cells: Vec<SweepCell> = points
        .par_iter()
        .map(|&(r, g_e)| match sweep_cell(r, g_e, template, geom, grid, opts) {
            Ok((ds, dv)) => SweepCell {
                r_cgs_1e40: r,
                g_e,
                delta_s: ds,
                delta_v_max: dv,
                error: None,
            },
            Err(e) => SweepCell {
                r_cgs_1e40: r,
                g_e,
                delta_s: f64::NAN,
                delta_v_max: f64::NAN,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(SweepResult { cells })
}

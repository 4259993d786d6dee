//! Command implementations behind the CLI: fringe, visibility, sweep and
//! oracle-check, including the resumable sweep journal.

use crate::config::RunConfig;
use crate::error::{config_err, Error, Result};
use crate::oracle::{compare_engine_oracle, mode_doubling_shift};
use crate::output::{format_g17, write_csv3, write_csv4, write_meta, MetaValue};
use crate::scenarios::{binned_pair_curve, run_sweep, velocity_bins, SweepCell};
use crate::talbot::SignalHarmonics;
use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Oracle acceptance thresholds: absolute visibility difference and fringe
/// RMS in units of the engine dc level.
pub const ORACLE_VIS_TOL: f64 = 0.01;
pub const ORACLE_RMS_TOL: f64 = 0.02;

fn out_dir(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(&cfg.output.dir)
}

fn meta_push_cutoffs(meta: &mut Vec<(String, MetaValue)>, side: &str, h: &SignalHarmonics) {
    for (i, (c, f)) in h.cutoffs.iter().zip(h.f_eff.iter()).enumerate() {
        meta.push((
            format!("x_c_g{}_{side}_nm", i + 1),
            MetaValue::Float(c.x_c * 1e9),
        ));
        meta.push((format!("f_eff_g{}_{side}", i + 1), MetaValue::Float(*f)));
    }
}

fn common_meta(cfg: &RunConfig) -> Vec<(String, MetaValue)> {
    let t = cfg.run.tolerances;
    vec![
        ("tool".into(), "chiraltl".into()),
        ("version".into(), VERSION.into()),
        ("theta1_mrad".into(), cfg.run.theta1_mrad.into()),
        ("theta2_mrad".into(), cfg.run.theta2_mrad.into()),
        ("quad_rel".into(), t.quad_rel.into()),
        ("quad_abs".into(), t.quad_abs.into()),
        ("tail_rel".into(), t.tail_rel.into()),
        ("phase_cap_rad".into(), t.phase_cap.into()),
    ]
}

/// `fringe`: one period of S(x3) for both enantiomers at the configured
/// velocity, plus the run record with the solved cut-offs.
pub fn run_fringe(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let v_z = cfg
        .run
        .v_z_mps
        .ok_or_else(|| Error::Config("fringe requires run.v_z_mps".into()))?;
    let (left, right) = cfg.build_pair(v_z)?;
    let opts = cfg.signal_options();
    let h_left = crate::talbot::signal_harmonics(&left, &opts)?;
    let h_right = crate::talbot::signal_harmonics(&right, &opts)?;
    let fr_left = crate::talbot::fringe_from_harmonics(&h_left.harmonics, h_left.d, opts.x3_grid)?;
    let fr_right =
        crate::talbot::fringe_from_harmonics(&h_right.harmonics, h_right.d, opts.x3_grid)?;

    let dir = out_dir(cfg);
    let fringe_path = dir.join("fringe.csv");
    let x3_nm: Vec<f64> = fr_left.x3.iter().map(|x| x * 1e9).collect();
    write_csv3(
        &fringe_path,
        "x3_nm,S_left,S_right",
        &x3_nm,
        &fr_left.s,
        &fr_right.s,
    )?;

    let mut meta = common_meta(cfg);
    meta.push(("command".into(), "fringe".into()));
    meta.push(("v_z_mps".into(), v_z.into()));
    meta.push(("L_over_Ltalbot".into(), h_left.talbot_ratio.into()));
    meta.push(("l_max_left".into(), h_left.l_max.into()));
    meta.push(("l_max_right".into(), h_right.l_max.into()));
    meta_push_cutoffs(&mut meta, "left", &h_left);
    meta_push_cutoffs(&mut meta, "right", &h_right);
    meta.push(("visibility_left".into(), fr_left.visibility.into()));
    meta.push(("visibility_right".into(), fr_right.visibility.into()));
    meta.push(("dc_left".into(), fr_left.dc_level.into()));
    meta.push(("dc_right".into(), fr_right.dc_level.into()));
    let meta_path = dir.join("meta.json");
    write_meta(&meta_path, &meta)?;
    Ok(vec![fringe_path, meta_path])
}

/// `visibility`: bin-averaged enantiomer visibilities at the bin centres of
/// the configured velocity range.
pub fn run_visibility(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let vr = cfg
        .run
        .v_range
        .ok_or_else(|| Error::Config("visibility requires [run.v_range]".into()))?;
    let bins = velocity_bins(vr.min, vr.max, vr.bin)?;
    let (left, right) = cfg.build_pair(vr.min)?;
    let opts = cfg.signal_options();
    let f = cfg.geometry()?.open_fraction_f;
    let curve = binned_pair_curve(&left, &right, &bins, f, &opts)?;

    let dir = out_dir(cfg);
    let vis_path = dir.join("visibility.csv");
    let v: Vec<f64> = curve.iter().map(|p| p.v_center).collect();
    let vl: Vec<f64> = curve.iter().map(|p| p.vis_left).collect();
    let vr_col: Vec<f64> = curve.iter().map(|p| p.vis_right).collect();
    write_csv3(&vis_path, "v_mps,vis_left,vis_right", &v, &vl, &vr_col)?;

    let mut meta = common_meta(cfg);
    meta.push(("command".into(), "visibility".into()));
    meta.push(("v_min_mps".into(), vr.min.into()));
    meta.push(("v_max_mps".into(), vr.max.into()));
    meta.push(("v_bin_mps".into(), vr.bin.into()));
    meta.push(("n_bins".into(), curve.len().into()));
    // cut-offs at the centre of the range, the primary enantiomer observable
    let mid = 0.5 * (vr.min + vr.max);
    let (l_mid, r_mid) = cfg.build_pair(mid)?;
    let h_l = crate::talbot::signal_harmonics(&l_mid, &opts)?;
    let h_r = crate::talbot::signal_harmonics(&r_mid, &opts)?;
    meta.push(("cutoff_reference_v_mps".into(), mid.into()));
    meta_push_cutoffs(&mut meta, "left", &h_l);
    meta_push_cutoffs(&mut meta, "right", &h_r);
    let meta_path = dir.join("meta.json");
    write_meta(&meta_path, &meta)?;
    Ok(vec![vis_path, meta_path])
}

fn journal_path(dir: &Path) -> PathBuf {
    dir.join("sweep.journal")
}

fn load_journal(path: &Path) -> HashMap<(usize, usize), (f64, f64)> {
    let mut done = HashMap::new();
    if let Ok(text) = std::fs::read_to_string(path) {
        for line in text.lines() {
            let mut it = line.split_whitespace();
            if let (Some(i), Some(j), Some(ds), Some(dv)) =
                (it.next(), it.next(), it.next(), it.next())
            {
                if let (Ok(i), Ok(j), Ok(ds), Ok(dv)) =
                    (i.parse(), j.parse(), ds.parse(), dv.parse())
                {
                    done.insert((i, j), (ds, dv));
                }
            }
        }
    }
    done
}

/// `sweep`: the (R_01, g_e) grid of Delta S and Delta V_max for the
/// all-coated scenario, resumable through a per-cell journal.
pub fn run_sweep_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.sweep_grid()?;
    let template = cfg.molecule()?;
    if template.g_m.is_none() {
        return config_err("sweep requires molecule.g_m (the magnetic anisotropy is held fixed)");
    }
    let geom = cfg.geometry()?;
    let opts = cfg.signal_options();
    let dir = out_dir(cfg);
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let jpath = journal_path(&dir);
    let done = load_journal(&jpath);

    // evaluate the missing cells in parallel, in deterministic order
    use rayon::prelude::*;
    let mut pending: Vec<(usize, usize, f64, f64)> = Vec::new();
    for (i, &r) in grid.r_values_cgs_1e40.iter().enumerate() {
        for (j, &g) in grid.g_e_values.iter().enumerate() {
            if !done.contains_key(&(i, j)) {
                pending.push((i, j, r, g));
            }
        }
    }
    let fresh: Vec<(usize, usize, Result<(f64, f64)>)> = pending
        .par_iter()
        .map(|&(i, j, r, g)| {
            (
                i,
                j,
                crate::scenarios::sweep_cell(r, g, &template, &geom, &grid, &opts),
            )
        })
        .collect();

    let mut journal = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&jpath)
        .map_err(|e| Error::Config(format!("cannot open journal: {e}")))?;
    let mut results: HashMap<(usize, usize), SweepCell> = HashMap::new();
    for ((i, j), (ds, dv)) in &done {
        results.insert(
            (*i, *j),
            SweepCell {
                r_cgs_1e40: grid.r_values_cgs_1e40[*i],
                g_e: grid.g_e_values[*j],
                delta_s: *ds,
                delta_v_max: *dv,
                error: None,
            },
        );
    }
    for (i, j, res) in fresh {
        let cell = match res {
            Ok((ds, dv)) => {
                writeln!(journal, "{i} {j} {} {}", format_g17(ds), format_g17(dv))
                    .map_err(|e| Error::Config(format!("journal write failed: {e}")))?;
                SweepCell {
                    r_cgs_1e40: grid.r_values_cgs_1e40[i],
                    g_e: grid.g_e_values[j],
                    delta_s: ds,
                    delta_v_max: dv,
                    error: None,
                }
            }
            Err(e) => SweepCell {
                r_cgs_1e40: grid.r_values_cgs_1e40[i],
                g_e: grid.g_e_values[j],
                delta_s: f64::NAN,
                delta_v_max: f64::NAN,
                error: Some(e.to_string()),
            },
        };
        results.insert((i, j), cell);
    }
    journal
        .flush()
        .map_err(|e| Error::Config(format!("journal flush failed: {e}")))?;

    let sweep_path = dir.join("sweep.csv");
    let rows = (0..grid.r_values_cgs_1e40.len()).flat_map(|i| {
        (0..grid.g_e_values.len()).map({
            let results = &results;
            move |j| {
                let c = &results[&(i, j)];
                [c.r_cgs_1e40, c.g_e, c.delta_s, c.delta_v_max]
            }
        })
    });
    write_csv4(&sweep_path, "R_cgs_1e40,g_e,delta_S,delta_V_max", rows)?;

    let n_err = results.values().filter(|c| c.error.is_some()).count();
    let mut meta = common_meta(cfg);
    meta.push(("command".into(), "sweep".into()));
    meta.push(("n_r".into(), grid.r_values_cgs_1e40.len().into()));
    meta.push(("n_g_e".into(), grid.g_e_values.len().into()));
    meta.push(("n_failed_cells".into(), n_err.into()));
    let meta_path = dir.join("meta.json");
    write_meta(&meta_path, &meta)?;
    if n_err > 0 {
        for c in results.values() {
            if let Some(e) = &c.error {
                eprintln!(
                    "cell R={} g_e={} failed: {e}",
                    c.r_cgs_1e40, c.g_e
                );
            }
        }
    }
    Ok(vec![sweep_path, meta_path])
}

/// Plain (non-resumable) sweep entry used by tests and examples.
pub fn run_sweep_in_memory(cfg: &RunConfig) -> Result<crate::scenarios::SweepResult> {
    let grid = cfg.sweep_grid()?;
    let template = cfg.molecule()?;
    let geom = cfg.geometry()?;
    run_sweep(&grid, &template, &geom, &cfg.signal_options())
}

/// `oracle-check`: engine vs brute-force wave propagation on the configured
/// molecule; exits nonzero when the agreement thresholds are missed.
pub fn run_oracle_check(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let v_z = cfg
        .run
        .v_z_mps
        .ok_or_else(|| Error::Config("oracle-check requires run.v_z_mps".into()))?;
    let single = cfg.build_single(v_z)?;
    let engine_opts = cfg.signal_options();
    let oracle_opts = cfg.oracle_options();
    let cmp = compare_engine_oracle(&single, &engine_opts, &oracle_opts)?;

    let dir = out_dir(cfg);
    let cmp_path = dir.join("oracle_check.csv");
    let x3_nm: Vec<f64> = cmp.engine.x3.iter().map(|x| x * 1e9).collect();
    write_csv3(
        &cmp_path,
        "x3_nm,S_engine,S_oracle",
        &x3_nm,
        &cmp.engine.s,
        &cmp.oracle.s,
    )?;

    let mut meta = common_meta(cfg);
    meta.push(("command".into(), "oracle-check".into()));
    meta.push(("v_z_mps".into(), v_z.into()));
    meta.push(("visibility_engine".into(), cmp.engine.visibility.into()));
    meta.push(("visibility_oracle".into(), cmp.oracle.visibility.into()));
    meta.push(("visibility_diff".into(), cmp.visibility_diff.into()));
    meta.push(("rms_over_dc".into(), cmp.rms_over_dc.into()));
    meta.push(("vis_tolerance".into(), ORACLE_VIS_TOL.into()));
    meta.push(("rms_tolerance".into(), ORACLE_RMS_TOL.into()));

    let conv = cfg.oracle.unwrap_or_default().convergence_check;
    if conv {
        let shift = mode_doubling_shift(&single, &oracle_opts)?;
        meta.push(("mode_doubling_visibility_shift".into(), shift.into()));
        if shift > 2e-3 {
            write_meta(&dir.join("meta.json"), &meta)?;
            return Err(Error::Oracle(format!(
                "oracle not converged: visibility shifted by {shift:.3e} when doubling the \
                 incoherent mode count (limit 2e-3)"
            )));
        }
    }
    let meta_path = dir.join("meta.json");
    write_meta(&meta_path, &meta)?;

    if cmp.visibility_diff > ORACLE_VIS_TOL || cmp.rms_over_dc > ORACLE_RMS_TOL {
        return Err(Error::Oracle(format!(
            "engine/oracle mismatch: |dV| = {:.4e} (tol {ORACLE_VIS_TOL}), fringe RMS/dc = {:.4e} \
             (tol {ORACLE_RMS_TOL})",
            cmp.visibility_diff, cmp.rms_over_dc
        )));
    }
    Ok(vec![cmp_path, meta_path])
}

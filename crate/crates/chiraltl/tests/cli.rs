//! End-to-end checks of the command-line surface: exit codes, machine-parsable
//! diagnostics, file schemas, byte-reproducibility and journal resume.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chiraltl")
}

fn preset_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .canonicalize()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chiraltl-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rewrite_config(src: &Path, out_dir: &Path, extra: &[(&str, &str)]) -> PathBuf {
    let mut text = std::fs::read_to_string(src).unwrap();
    for (from, to) in extra {
        text = text.replace(from, to);
    }
    // point the output at the scratch directory
    let dir_line = format!("dir = \"{}\"", out_dir.join("out").display());
    let start = text.find("dir = ").unwrap();
    let end = text[start..].find('\n').unwrap() + start;
    text.replace_range(start..end, &dir_line);
    let path = out_dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn fringe_writes_schema_and_is_byte_reproducible() {
    let dir = scratch("fringe");
    let cfg = rewrite_config(&preset_dir().join("fig2i.toml"), &dir, &[]);
    let run = || {
        let st = Command::new(bin())
            .args(["fringe"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        std::fs::read(dir.join("out/fringe.csv")).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "rerun must be byte-identical");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x3_nm,S_left,S_right");
    assert_eq!(text.lines().count(), 1 + 512);
    assert!(text.ends_with('\n'));
    // enantiomer ordering from the meta record
    let meta = std::fs::read_to_string(dir.join("out/meta.json")).unwrap();
    assert!(meta.contains("\"x_c_g2_right_nm\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn zero_chirality_columns_are_byte_identical() {
    let dir = scratch("neutral");
    let cfg = rewrite_config(
        &preset_dir().join("fig2i.toml"),
        &dir,
        &[("R01_cgs_1e40 = 700.0", "R01_cgs_1e40 = 0.0")],
    );
    let st = Command::new(bin()).arg("fringe").arg(&cfg).output().unwrap();
    assert!(st.status.success());
    let text = std::fs::read_to_string(dir.join("out/fringe.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], cols[2], "S_left and S_right must coincide");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn malformed_config_exits_2_with_diagnostic() {
    let dir = scratch("badf");
    let cfg = rewrite_config(&preset_dir().join("fig2i.toml"), &dir, &[("f = 0.45", "f = 1.2")]);
    let st = Command::new(bin()).arg("fringe").arg(&cfg).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let err = String::from_utf8_lossy(&st.stderr);
    let first = err.lines().next().unwrap_or("");
    assert!(
        first.starts_with("ERROR config: open_fraction"),
        "diagnostic was: {first}"
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn visibility_emits_one_row_per_bin() {
    let dir = scratch("vis");
    // narrow the range to keep the run quick: 3 bins
    let cfg = rewrite_config(
        &preset_dir().join("fig2i.toml"),
        &dir,
        &[(
            "v_range = { min = 100.0, max = 200.0, bin = 10.0 }",
            "v_range = { min = 150.0, max = 180.0, bin = 10.0 }",
        )],
    );
    let st = Command::new(bin())
        .arg("visibility")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(dir.join("out/visibility.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "v_mps,vis_left,vis_right");
    assert_eq!(lines.len(), 1 + 3);
    assert!(lines[1].starts_with("1.55"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sweep_single_cell_and_journal_resume() {
    let dir = scratch("sweep");
    let cfg = rewrite_config(
        &preset_dir().join("fig5.toml"),
        &dir,
        &[
            (
                "r_min_cgs_1e40 = 100.0",
                "r_min_cgs_1e40 = 1000.0",
            ),
            (
                "r_max_cgs_1e40 = 10000.0",
                "r_max_cgs_1e40 = 1000.0",
            ),
            ("n_r = 21", "n_r = 1"),
            ("g_e_min = 0.1", "g_e_min = 0.2"),
            ("g_e_max = 0.5", "g_e_max = 0.2"),
            ("n_g_e = 17", "n_g_e = 1"),
            (
                "v_range = { min = 100.0, max = 200.0, bin = 10.0 }",
                "v_range = { min = 140.0, max = 150.0, bin = 10.0 }",
            ),
        ],
    );
    let run = || {
        let st = Command::new(bin()).arg("sweep").arg(&cfg).output().unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        std::fs::read(dir.join("out/sweep.csv")).unwrap()
    };
    let first = run();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "R_cgs_1e40,g_e,delta_S,delta_V_max");
    assert_eq!(lines.len(), 2, "1x1 grid produces a single row");
    let ds: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(ds > 0.0);
    assert!(dir.join("out/sweep.journal").exists());
    // resume: remove the CSV, keep the journal; rerun must not recompute and
    // must reproduce the file byte-for-byte
    std::fs::remove_file(dir.join("out/sweep.csv")).unwrap();
    let t0 = std::time::Instant::now();
    let second = run();
    assert!(
        t0.elapsed().as_millis() < 1500,
        "journal resume must skip the computation"
    );
    assert_eq!(first, second);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn oracle_check_passes_on_ideal_and_flags_nyquist() {
    let dir = scratch("oracle");
    // chirality off: ideal-mask comparison, fast and within tolerance
    let cfg = rewrite_config(
        &preset_dir().join("fig2i.toml"),
        &dir,
        &[("R01_cgs_1e40 = 700.0", "R01_cgs_1e40 = 0.0")],
    );
    let st = Command::new(bin())
        .arg("oracle-check")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        st.status.success(),
        "oracle-check failed: {}",
        String::from_utf8_lossy(&st.stderr)
    );
    let text = std::fs::read_to_string(dir.join("out/oracle_check.csv")).unwrap();
    assert!(text.starts_with("x3_nm,S_engine,S_oracle"));

    // deliberately coarsened grid: config error (exit 2) naming Nyquist
    let cfg2 = rewrite_config(
        &preset_dir().join("fig2i.toml"),
        &dir,
        &[(
            "[output]",
            "[oracle]\nn_samples = 1024\nn_periods = 64\n\n[output]",
        )],
    );
    let st = Command::new(bin())
        .arg("oracle-check")
        .arg(&cfg2)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("Nyquist"));
    let _ = std::fs::remove_dir_all(&dir);
}

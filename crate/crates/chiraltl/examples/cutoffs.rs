//! Solve the deflection (G1/G2) and fly-through (G3) cut-off distances of
//! the hexahelicene enantiomers at a perfectly chiral grating, across the
//! velocity range.
//!
//!     cargo run --release --example cutoffs

use chiraltl::constants::{cgs_rotatory_to_si, DALTON};
use chiraltl::cutoff::cutoff_for_grating;
use chiraltl::domain::Molecule;
use chiraltl::scenarios::{build_config, Geometry, Scenario};

fn main() -> chiraltl::Result<()> {
    let right = Molecule {
        mass: 328.0 * DALTON,
        omega1: 2.0 * std::f64::consts::PI * 1.0e15,
        rotatory_strength: cgs_rotatory_to_si(700.0),
        g_e: None,
        g_m: None,
    };
    let left = right.mirrored();
    let geom = Geometry::fig2();

    println!("hexahelicene at a perfectly right-handed chiral G2 (deflection, 2 mrad)");
    println!(
        "{:>8} {:>16} {:>16}",
        "v (m/s)", "x_c right (nm)", "x_c left (nm)"
    );
    for v_z in [100.0, 120.0, 140.0, 160.0, 180.0, 200.0] {
        let cfg_r = build_config(Scenario::PerfectChiralG2, &right, &geom, v_z)?;
        let cfg_l = build_config(Scenario::PerfectChiralG2, &left, &geom, v_z)?;
        let xc_r = cutoff_for_grating(&cfg_r.g2, &cfg_r.molecule, v_z)?;
        let xc_l = cutoff_for_grating(&cfg_l.g2, &cfg_l.molecule, v_z)?;
        println!(
            "{v_z:>8.0} {:>16.3} {:>16.3}",
            xc_r.x_c * 1e9,
            xc_l.x_c * 1e9
        );
    }

    println!("\nall-coated gratings, 1000 Da molecule (G3 fly-through)");
    let mol = Molecule {
        mass: 1000.0 * DALTON,
        rotatory_strength: cgs_rotatory_to_si(1000.0),
        g_e: Some(0.2),
        g_m: Some(5.0),
        ..right
    };
    let geom34 = Geometry::fig34();
    println!(
        "{:>8} {:>16} {:>16}",
        "v (m/s)", "x_c right (nm)", "x_c left (nm)"
    );
    for v_z in [100.0, 140.0, 200.0] {
        let cfg_r = build_config(Scenario::AllCoated, &mol, &geom34, v_z)?;
        let cfg_l = build_config(Scenario::AllCoated, &mol.mirrored(), &geom34, v_z)?;
        let xc_r = cutoff_for_grating(&cfg_r.g3, &cfg_r.molecule, v_z)?;
        let xc_l = cutoff_for_grating(&cfg_l.g3, &cfg_l.molecule, v_z)?;
        println!(
            "{v_z:>8.0} {:>16.3} {:>16.3}",
            xc_r.x_c * 1e9,
            xc_l.x_c * 1e9
        );
    }
    Ok(())
}

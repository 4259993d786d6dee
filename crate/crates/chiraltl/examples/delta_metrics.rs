//! Enantiomer-difference metrics for the all-coated scenario: bin-averaged
//! Delta S and visibility differences over the velocity range, plus one cell
//! of the (R_01, g_e) sweep.
//!
//!     cargo run --release --example delta_metrics

use chiraltl::constants::{cgs_rotatory_to_si, DALTON};
use chiraltl::domain::Molecule;
use chiraltl::scenarios::{
    binned_pair_curve, delta_s_max, delta_v_max, scenario_pair, velocity_bins, Geometry,
    Scenario,
};
use chiraltl::talbot::SignalOptions;

fn main() -> chiraltl::Result<()> {
    let molecule = Molecule {
        mass: 1000.0 * DALTON,
        omega1: 2.0 * std::f64::consts::PI * 1.0e15,
        rotatory_strength: cgs_rotatory_to_si(1000.0),
        g_e: Some(0.2),
        g_m: Some(5.0),
    };
    let geom = Geometry::fig34();
    let (left, right) = scenario_pair(Scenario::AllCoated, &molecule, &geom, 140.0)?;
    let bins = velocity_bins(100.0, 200.0, 10.0)?;
    let opts = SignalOptions::default();
    let curve = binned_pair_curve(&left, &right, &bins, geom.open_fraction_f, &opts)?;

    println!("all gratings coated, |R01| = 1000e-40 cgs, g_e = 0.2, g_m = 5");
    println!(
        "{:>10} {:>10} {:>10} {:>12}",
        "v (m/s)", "V left", "V right", "Delta S"
    );
    for p in &curve {
        println!(
            "{:>10.0} {:>10.5} {:>10.5} {:>12.5}",
            p.v_center, p.vis_left, p.vis_right, p.delta_s
        );
    }
    println!(
        "\nDelta S (max over bins)     = {:.5}",
        delta_s_max(&curve)
    );
    println!("Delta V_max (max over bins) = {:.5}", delta_v_max(&curve));
    Ok(())
}

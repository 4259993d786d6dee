//! Monochromatic fringe visibility as a function of velocity for the
//! enantiomers of the strong-chirality molecule at the perfectly chiral G2.
//!
//!     cargo run --release --example visibility_curve

use chiraltl::constants::{cgs_rotatory_to_si, DALTON};
use chiraltl::domain::Molecule;
use chiraltl::scenarios::{scenario_pair, Geometry, Scenario};
use chiraltl::talbot::{visibility_curve, SignalOptions};

fn main() -> chiraltl::Result<()> {
    let molecule = Molecule {
        mass: 1000.0 * DALTON,
        omega1: 2.0 * std::f64::consts::PI * 1.0e15,
        rotatory_strength: cgs_rotatory_to_si(7000.0),
        g_e: None,
        g_m: None,
    };
    let (left, right) = scenario_pair(
        Scenario::PerfectChiralG2,
        &molecule,
        &Geometry::fig2(),
        140.0,
    )?;
    let opts = SignalOptions::default();
    let n = 51;
    let curve_l = visibility_curve(&left, (100.0, 200.0), n, &opts)?;
    let curve_r = visibility_curve(&right, (100.0, 200.0), n, &opts)?;

    println!("1000 Da molecule, |R01| = 7000e-40 cgs, perfectly chiral G2");
    println!("{:>8} {:>10} {:>10} {:>10}", "v (m/s)", "V left", "V right", "|diff|");
    for (l, r) in curve_l.iter().zip(&curve_r) {
        println!(
            "{:>8.0} {:>10.4} {:>10.4} {:>10.4}",
            l.0,
            l.1,
            r.1,
            (l.1 - r.1).abs()
        );
    }
    let max_diff = curve_l
        .iter()
        .zip(&curve_r)
        .map(|(l, r)| (l.1 - r.1).abs())
        .fold(0.0f64, f64::max);
    println!("\nlargest enantiomer visibility difference: {max_diff:.4}");
    Ok(())
}

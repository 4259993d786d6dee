//! One period of the transmission fringe S(x3) for both hexahelicene
//! enantiomers behind the perfectly chiral second grating, as an ASCII
//! sketch plus summary numbers.
//!
//!     cargo run --release --example fringe_enantiomers

use chiraltl::constants::{cgs_rotatory_to_si, DALTON};
use chiraltl::domain::Molecule;
use chiraltl::scenarios::{scenario_pair, Geometry, Scenario};
use chiraltl::talbot::{signal, SignalOptions, X3Grid};

fn main() -> chiraltl::Result<()> {
    let molecule = Molecule {
        mass: 328.0 * DALTON,
        omega1: 2.0 * std::f64::consts::PI * 1.0e15,
        rotatory_strength: cgs_rotatory_to_si(700.0),
        g_e: None,
        g_m: None,
    };
    let (left, right) = scenario_pair(
        Scenario::PerfectChiralG2,
        &molecule,
        &Geometry::fig2(),
        180.0,
    )?;
    let opts = SignalOptions {
        x3_grid: X3Grid::PeriodSamples(64),
        ..Default::default()
    };
    let fr_l = signal(&left, &opts)?;
    let fr_r = signal(&right, &opts)?;

    println!("hexahelicene, perfectly chiral G2, v_z = 180 m/s, one period of d = 257 nm");
    println!("L = left-handed, R = right-handed\n");
    let smax = fr_l.s.iter().cloned().fold(0.0, f64::max);
    for (i, x) in fr_l.x3.iter().enumerate() {
        let col_l = (fr_l.s[i] / smax * 56.0) as usize;
        let col_r = (fr_r.s[i] / smax * 56.0) as usize;
        let mut row = vec![b' '; 60];
        row[col_r.min(59)] = b'R';
        row[col_l.min(59)] = b'L';
        println!("{:>6.1} nm |{}", x * 1e9, String::from_utf8(row).unwrap());
    }
    println!(
        "\nmean transmission: left {:.5e}, right {:.5e} (right-handed depleted)",
        fr_l.dc_level, fr_r.dc_level
    );
    println!(
        "visibility:        left {:.4}, right {:.4}",
        fr_l.visibility, fr_r.visibility
    );
    Ok(())
}

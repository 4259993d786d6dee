//! Cross-validate the Talbot coefficient engine against the brute-force
//! wave-optics oracle, first on ideal gratings at an exact revival, then on
//! the potential-dressed chiral case.
//!
//!     cargo run --release --example oracle_check

use chiraltl::constants::{cgs_rotatory_to_si, DALTON};
use chiraltl::domain::Molecule;
use chiraltl::oracle::{compare_engine_oracle, OracleOptions};
use chiraltl::scenarios::{scenario_pair, Geometry, Scenario};
use chiraltl::talbot::SignalOptions;

fn main() -> chiraltl::Result<()> {
    let hexahelicene = Molecule {
        mass: 328.0 * DALTON,
        omega1: 2.0 * std::f64::consts::PI * 1.0e15,
        rotatory_strength: cgs_rotatory_to_si(700.0),
        g_e: None,
        g_m: None,
    };
    let geom = Geometry::fig2();

    // ideal masks: chirality switched off, separation at two Talbot lengths
    let neutral = Molecule {
        rotatory_strength: 0.0,
        ..hexahelicene.clone()
    };
    let (_, mut ideal) = scenario_pair(Scenario::PerfectChiralG2, &neutral, &geom, 180.0)?;
    ideal.separation_l = 2.0 * ideal.talbot_length()?;
    let cmp = compare_engine_oracle(&ideal, &SignalOptions::default(), &OracleOptions::default())?;
    println!("ideal gratings at L = 2 L_Talbot:");
    println!(
        "  visibility engine {:.5} / oracle {:.5}, fringe rms/dc = {:.2e}",
        cmp.engine.visibility, cmp.oracle.visibility, cmp.rms_over_dc
    );

    // dressed: right-handed hexahelicene at the right-chiral G2, L = L_Talbot
    let (_, mut dressed) = scenario_pair(Scenario::PerfectChiralG2, &hexahelicene, &geom, 180.0)?;
    dressed.separation_l = dressed.talbot_length()?;
    let cmp = compare_engine_oracle(
        &dressed,
        &SignalOptions::default(),
        &OracleOptions::default(),
    )?;
    println!("chirally dressed G2 at L = L_Talbot:");
    println!(
        "  visibility engine {:.5} / oracle {:.5}, fringe rms/dc = {:.2e}",
        cmp.engine.visibility, cmp.oracle.visibility, cmp.rms_over_dc
    );
    Ok(())
}

//! Tabulate Casimir-Polder wall potentials and forces for the three wall
//! models and write the profile of the chiral mirror to CSV
//! (header `x_nm,V_J,F_N`).
//!
//!     cargo run --release --example potential_profile

use chiraltl::constants::{cgs_rotatory_to_si, DALTON};
use chiraltl::domain::{DielectricModel, Molecule, WallModel};
use chiraltl::potentials::PreparedWall;
use std::io::Write;

fn main() -> chiraltl::Result<()> {
    let hexahelicene = Molecule {
        mass: 328.0 * DALTON,
        omega1: 2.0 * std::f64::consts::PI * 1.0e15,
        rotatory_strength: cgs_rotatory_to_si(700.0),
        g_e: None,
        g_m: None,
    };
    let coated_mol = Molecule {
        mass: 1000.0 * DALTON,
        rotatory_strength: cgs_rotatory_to_si(1000.0),
        g_e: Some(0.2),
        g_m: Some(5.0),
        ..hexahelicene.clone()
    };

    let walls = [
        (
            "perfect chiral mirror (right-handed), hexahelicene",
            PreparedWall::prepare(&WallModel::PerfectChiral { r_c_sign: 1.0 }, &hexahelicene)?,
        ),
        (
            "bare SiN wall, 1000 Da molecule",
            PreparedWall::prepare(
                &WallModel::BareSiN {
                    dielectric: DielectricModel::SILICON_NITRIDE,
                },
                &coated_mol,
            )?,
        ),
        (
            "SiN wall + 10 nm right-handed coating, 1000 Da molecule",
            PreparedWall::prepare(
                &WallModel::CoatedSiN {
                    dielectric: DielectricModel::SILICON_NITRIDE,
                    coating: coated_mol.clone(),
                    n_b: 5.0e28,
                    a: 10.0e-9,
                },
                &coated_mol,
            )?,
        ),
    ];

    for (name, wall) in &walls {
        println!("\n{name}");
        println!("{:>8} {:>14} {:>14}", "u (nm)", "V (J)", "F (N)");
        for &u_nm in &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let u = u_nm * 1e-9;
            println!(
                "{u_nm:>8.1} {:>14.4e} {:>14.4e}",
                wall.v_profile(u),
                wall.force_profile(u)
            );
        }
    }

    // CSV export of the chiral-mirror profile for both enantiomers
    let path = std::env::temp_dir().join("chiral_mirror_profile.csv");
    let mut f = std::fs::File::create(&path).expect("create csv");
    writeln!(f, "x_nm,V_J,F_N").unwrap();
    let wall = &walls[0].1;
    for i in 1..=400 {
        let x = 0.25e-9 * i as f64;
        writeln!(
            f,
            "{},{},{}",
            chiraltl::output::format_g17(x * 1e9),
            chiraltl::output::format_g17(wall.v(x)),
            chiraltl::output::format_g17(wall.force(x))
        )
        .unwrap();
    }
    println!("\nwrote {}", path.display());
    Ok(())
}

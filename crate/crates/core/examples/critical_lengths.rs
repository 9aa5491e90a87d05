//! Critical lengths L0 over the three space-form branches, computed both
//! from the intrinsic radius directly and from the circle's curvature.

use ekt_cylinders::cylinder::CircleData;
use ekt_cylinders::geometry::SpaceParams;
use ekt_cylinders::spectrum_analytic::{critical_length, critical_length_branches};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>5} {:>5} {:>14} {:>14} {:>9}", "kappa", "tau", "rho", "L0", "L0 (branches)", "rel diff");
    for kappa in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        for tau in [0.0, 0.5, 2.0] {
            for rho in [0.2, 0.7, 1.2] {
                let circle = match CircleData::from_rho(SpaceParams::new(kappa, tau)?, rho) {
                    Ok(c) => c,
                    Err(e) => {
                        println!("{kappa:>6} {tau:>5} {rho:>5}  skipped: {e}");
                        continue;
                    }
                };
                let l0 = critical_length(&circle);
                let other = critical_length_branches(kappa, tau, rho);
                println!(
                    "{kappa:>6} {tau:>5} {rho:>5} {l0:>14.9} {other:>14.9} {:>9.1e}",
                    (l0 - other).abs() / l0
                );
            }
        }
    }
    // the classical Plateau-Rayleigh value
    let flat = CircleData::from_rho(SpaceParams::euclidean(), 1.0)?;
    println!("\nkappa = tau = 0, rho = 1: L0 = {} (2 pi = {})", critical_length(&flat), std::f64::consts::TAU);
    Ok(())
}

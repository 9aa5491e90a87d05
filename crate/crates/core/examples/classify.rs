//! Stability verdicts of a fixed circle as the cylinder grows, with the
//! closed-form Morse and weak indices.

use ekt_cylinders::cylinder::CircleData;
use ekt_cylinders::geometry::SpaceParams;
use ekt_cylinders::spectrum_analytic::{classify, critical_length, spectrum, BoundaryCondition, TruncatedCylinder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circle = CircleData::from_rho(SpaceParams::new(-1.0, 0.5)?, 1.0)?;
    let l0 = critical_length(&circle);
    println!("kappa=-1 tau=0.5 rho=1: L0 = {l0:.6}");
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        println!("\n{bc}");
        for ratio in [0.25, 0.5, 0.75, 1.0, 1.25, 2.0, 3.0] {
            let tc = TruncatedCylinder::new(circle, ratio * l0, bc)?;
            let v = classify(&tc)?;
            let s = spectrum(&tc, 4)?;
            println!(
                "  L = {ratio:.2} L0: {:<24} general {:<22} lambda1 {:+.4} lambda2 {:+.4} morse {} weak {}",
                v.axisym.name(),
                v.general.name(),
                s.lambda1,
                s.lambda2,
                s.morse_index,
                s.weak_index_axisym
            );
        }
    }
    Ok(())
}

//! Discrete Morse and weak indices against the closed-form axially
//! symmetric counts. With twist the discrete indices are larger: modes
//! varying around the circle go negative too.

use ekt_cylinders::cylinder::CircleData;
use ekt_cylinders::geometry::SpaceParams;
use ekt_cylinders::spectrum_analytic::{critical_length, spectrum, BoundaryCondition, TruncatedCylinder};
use ekt_cylinders::spectrum_numeric::{assemble, morse_index, solve_smallest, weak_index, GridSize};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSize::new(32, 48)?;
    for (kappa, tau, rho) in [(0.0, 0.0, 1.0), (-1.0, 0.5, 1.0), (0.0, 1.0, 1.0)] {
        let circle = CircleData::from_rho(SpaceParams::new(kappa, tau)?, rho)?;
        let l0 = critical_length(&circle);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let tc = TruncatedCylinder::new(circle, 1.7 * l0, bc)?;
            let df = assemble(&tc, grid)?;
            let lowest = solve_smallest(&df, 4)?;
            let analytic = spectrum(&tc, 4)?;
            println!(
                "kappa={kappa} tau={tau} rho={rho} {bc:<9} morse {} (axisym {}), weak {} (axisym {}), lowest {:?}",
                morse_index(&df)?,
                analytic.morse_index,
                weak_index(&df, 8)?,
                analytic.weak_index_axisym,
                lowest.eigenvalues.iter().map(|l| (l * 1e4).round() / 1e4).collect::<Vec<_>>()
            );
        }
    }
    Ok(())
}

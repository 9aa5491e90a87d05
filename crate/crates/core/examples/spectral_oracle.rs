//! Compares the discrete spectrum with the closed-form eigenvalues at a
//! grid and its refinement, for both boundary conditions.

use ekt_cylinders::cylinder::CircleData;
use ekt_cylinders::geometry::SpaceParams;
use ekt_cylinders::spectrum_analytic::{critical_length, BoundaryCondition, TruncatedCylinder};
use ekt_cylinders::spectrum_numeric::{verify, GridSize, DEFAULT_VERIFY_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSize::new(64, 64)?;
    for (kappa, tau, rho) in [(0.0, 0.0, 1.0), (-1.0, 0.5, 1.0), (1.0, 0.5, 0.8)] {
        let circle = CircleData::from_rho(SpaceParams::new(kappa, tau)?, rho)?;
        let length = 1.5 * critical_length(&circle);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let start = std::time::Instant::now();
            let tc = TruncatedCylinder::new(circle, length, bc)?;
            let report = verify(&tc, grid, 2, DEFAULT_VERIFY_TOL)?;
            println!("kappa={kappa} tau={tau} rho={rho} {bc}: pass={} ({:.1?})", report.pass, start.elapsed());
            for m in &report.modes {
                println!(
                    "  n={} analytic={:+.6} numeric={:+.6} rel_err={:.2e} order={}",
                    m.n,
                    m.analytic,
                    m.numeric,
                    m.rel_err,
                    m.order.map_or("-".to_string(), |p| format!("{p:.2}"))
                );
            }
        }
    }
    Ok(())
}

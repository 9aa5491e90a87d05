//! Evaluates the discrete second variation on the mean-zero witness
//! sin(2 pi t / L): negative just above the critical length, positive just
//! below it.

use std::f64::consts::PI;

use ekt_cylinders::cylinder::CircleData;
use ekt_cylinders::geometry::SpaceParams;
use ekt_cylinders::spectrum_analytic::{critical_length, BoundaryCondition, TruncatedCylinder};
use ekt_cylinders::spectrum_numeric::instability_certificate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (kappa, tau, rho) in [(0.0, 0.0, 1.0), (-1.0, 0.5, 1.0), (1.0, 0.5, 0.8)] {
        let circle = CircleData::from_rho(SpaceParams::new(kappa, tau)?, rho)?;
        let l0 = critical_length(&circle);
        for ratio in [0.9, 1.1] {
            let tc = TruncatedCylinder::new(circle, ratio * l0, BoundaryCondition::Dirichlet)?;
            let cert = instability_certificate(&tc)?;
            println!(
                "kappa={kappa} tau={tau} rho={rho} L={ratio} L0: Q = {:+.6e}, mean = {:.1e}, certified unstable: {}",
                cert.q_value, cert.mean, cert.certified
            );
        }
    }
    let tc = TruncatedCylinder::new(CircleData::from_rho(SpaceParams::euclidean(), 1.0)?, 4.0 * PI, BoundaryCondition::Dirichlet)?;
    let cert = instability_certificate(&tc)?;
    println!("\nround cylinder, L = 4 pi: Q = {:.6} (exact -3 pi^2 = {:.6})", cert.q_value, -3.0 * PI * PI);
    Ok(())
}

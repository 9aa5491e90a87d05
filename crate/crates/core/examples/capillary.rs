//! Boundary geometry on the support planes: circular cylinders meet them
//! at a right angle with vanishing Robin coefficient, while the contact
//! angle along geodesics and equidistant curves varies unless tau = 0.

use std::f64::consts::PI;

use ekt_cylinders::capillary::{
    circular_boundary_frame, contact_angle_profile, partition_strong_stability, profile_oscillation,
};
use ekt_cylinders::cylinder::{CircleData, NonCircleData};
use ekt_cylinders::geometry::SpaceParams;
use ekt_cylinders::spectrum_numeric::GridSize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (kappa, tau, rho) in [(-1.0, 0.7, 1.0), (0.0, 1.0, 2.0), (4.0, 1.5, 0.6)] {
        let circle = CircleData::from_rho(SpaceParams::new(kappa, tau)?, rho)?;
        let (mut cos_gamma, mut q) = (0.0f64, 0.0f64);
        for i in 0..16 {
            let f = circular_boundary_frame(&circle, 2.0 * PI * circle.big_r() * i as f64 / 16.0)?;
            cos_gamma = cos_gamma.max(f.cos_gamma.abs());
            q = q.max(f.q.abs());
        }
        println!("circle kappa={kappa} tau={tau} rho={rho}: max|cos gamma| = {cos_gamma:.1e}, max|q| = {q:.1e}");
    }

    for tau in [0.0, 0.5] {
        let sp = SpaceParams::new(-1.0, tau)?;
        let geodesic = contact_angle_profile(&NonCircleData::geodesic(sp)?, -1.9, 1.9, 101)?;
        let equidistant = contact_angle_profile(&NonCircleData::offset_circle(sp, 1.5, 1.0)?, 0.0, 2.0 * PI, 200)?;
        println!(
            "tau={tau}: cos gamma oscillation along geodesic {:.3e}, along equidistant curve {:.3e}",
            profile_oscillation(&geodesic),
            profile_oscillation(&equidistant)
        );
    }

    let grid = GridSize::new(48, 32)?;
    for kappa_g in [0.0, 0.5, 0.9, 1.0] {
        let rep = partition_strong_stability(-1.0, kappa_g, 20.0, grid)?;
        println!(
            "H2 x R, kappa_g={kappa_g}: min eigenvalue {:.6} (tol {:.1e}) strongly stable: {}",
            rep.min_eig, rep.tol_zero, rep.strongly_stable
        );
    }
    Ok(())
}

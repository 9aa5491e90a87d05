//! The one-dimensional problem along a geodesic in the hyperbolic plane,
//! cut off at growing radii: the lowest eigenvalue stays positive.

use ekt_cylinders::spectrum_analytic::noncompact_geodesic_problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kappa: f64 = -1.0;
    let edge = 2.0 / (-kappa).sqrt();
    for length in [5.0, 20.0] {
        for frac in [0.5, 0.8, 0.95, 0.99] {
            let lowest: Vec<String> = (0..3)
                .map(|k| noncompact_geodesic_problem(kappa, length, frac * edge, k, 1).map(|l| format!("{l:.6}")))
                .collect::<Result<_, _>>()?;
            println!("L={length} s0={frac:.2}*s1: lowest eigenvalue for k=0,1,2: {}", lowest.join(", "));
        }
    }
    Ok(())
}

//! Support planes z = const, boundary data of vertical cylinders meeting
//! them, and the Robin coefficient of the free-boundary second variation.
//!
//! Second fundamental forms follow A(X, Y) = ⟨∇̄_X Y, ξ⟩ for a unit normal ξ.
//! The plane form [`plane_second_ff`] is taken with respect to −Ñ in the
//! convention where the shape operator is X ↦ ∇̄_X ξ, which is the same
//! matrix as ⟨∇̄_{φ_i} φ_j, Ñ⟩.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::cylinder::{cylinder_geometry, classify_curve, CircleData, CurveKind, NonCircleData};
use crate::error::{finite, Error, Result};
use crate::geometry::{FrameVector, Point, SpaceParams};
use crate::spectrum_numeric::{solve_smallest, DiscreteForm, GridSize, RectProblem, SideBc};

/// The horizontal plane z = c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneData {
    pub c: f64,
    pub sp: SpaceParams,
}

impl PlaneData {
    pub fn new(sp: SpaceParams, c: f64) -> Result<Self> {
        finite("c", c)?;
        Ok(Self { c, sp })
    }

    /// φ(x, y) = (x, y, c).
    pub fn point(&self, x: f64, y: f64) -> Result<Point> {
        self.sp.check_xy(x, y)?;
        Ok(Point::new(x, y, self.c))
    }

    /// (φ_x, φ_y) in frame components.
    pub fn tangents(&self, x: f64, y: f64) -> Result<(FrameVector, FrameVector)> {
        plane_tangents(&self.sp, x, y)
    }

    pub fn normal(&self, x: f64, y: f64) -> Result<FrameVector> {
        plane_normal(&self.sp, x, y)
    }

    pub fn second_ff(&self, x: f64, y: f64) -> Result<Matrix2<f64>> {
        plane_second_ff(&self.sp, x, y)
    }
}

/// φ_x = σ(E₁ + τy E₃), φ_y = σ(E₂ − τx E₃).
pub fn plane_tangents(sp: &SpaceParams, x: f64, y: f64) -> Result<(FrameVector, FrameVector)> {
    sp.check_xy(x, y)?;
    let s = sp.sigma(x, y);
    let t = sp.tau();
    Ok((FrameVector::new(s, 0.0, s * t * y), FrameVector::new(0.0, s, -s * t * x)))
}

/// Unit normal Ñ = (−τy E₁ + τx E₂ + E₃)/√(1 + τ²(x² + y²)).
pub fn plane_normal(sp: &SpaceParams, x: f64, y: f64) -> Result<FrameVector> {
    sp.check_xy(x, y)?;
    let t = sp.tau();
    let w = (1.0 + t * t * (x * x + y * y)).sqrt();
    Ok(FrameVector::new(-t * y / w, t * x / w, 1.0 / w))
}

/// Matrix of the plane's second fundamental form in the basis {φ_x, φ_y},
/// with respect to −Ñ.
pub fn plane_second_ff(sp: &SpaceParams, x: f64, y: f64) -> Result<Matrix2<f64>> {
    sp.check_xy(x, y)?;
    let t = sp.tau();
    let t2 = t * t;
    let s = sp.sigma(x, y);
    let s2 = s * s;
    let (sx, sy) = sp.sigma_gradient(x, y);
    let d = x * x - y * y;
    let pre = t / (1.0 + t2 * (x * x + y * y)).sqrt();
    let m = Matrix2::new(
        -x * (sy + 2.0 * t2 * y * s2),
        -s + (1.0 + d * t2) * s2 - y * sy,
        s - (1.0 - d * t2) * s2 + x * sx,
        y * (2.0 * x * t2 * s2 + sx),
    );
    Ok(m * pre)
}

/// q = (Ã(ν̃,ν̃) + cos γ · A(ν,ν)) / sin γ.
pub fn robin_coefficient(gamma: f64, atilde_nn: f64, a_nn: f64) -> Result<f64> {
    finite("gamma", gamma)?;
    finite("atilde_nn", atilde_nn)?;
    finite("a_nn", a_nn)?;
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::DegenerateAngle(gamma));
    }
    Ok((atilde_nn + gamma.cos() * a_nn) / gamma.sin())
}

/// Normals and conormals of a circular cylinder and of the plane z = 0 at
/// a boundary point, all in frame components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryFrame {
    pub point: Point,
    /// Outward cylinder normal.
    pub n: FrameVector,
    pub n_tilde: FrameVector,
    /// Cylinder conormal, pointing up the fibre.
    pub nu: FrameVector,
    /// Plane conormal, pointing out of the disk bounded by the circle.
    pub nu_tilde: FrameVector,
    pub cos_gamma: f64,
    pub gamma: f64,
    /// Ã(ν̃, ν̃).
    pub atilde_nn: f64,
    /// A(ν, ν) of the cylinder with respect to N.
    pub a_nn: f64,
    pub q: f64,
}

/// Boundary data at arclength `s` along the circle, on the bottom plane.
pub fn circular_boundary_frame(c: &CircleData, s: f64) -> Result<BoundaryFrame> {
    finite("s", s)?;
    let sp = *c.space();
    let (r, big_r, tau) = (c.r(), c.big_r(), c.tau());
    let (sin, cos) = (s / big_r).sin_cos();
    let (x, y) = (r * cos, r * sin);
    let point = Point::new(x, y, 0.0);

    let n = FrameVector::new(cos, sin, 0.0);
    let n_tilde = plane_normal(&sp, x, y)?;
    let a = c.fiber_stiffness();
    let nu = FrameVector::new(-y * tau, x * tau, 1.0).scale(1.0 / a.sqrt());

    // ν̃ = w₁φ_x + w₂φ_y with w = −(x, y)/(rσ)
    let (phi_x, phi_y) = plane_tangents(&sp, x, y)?;
    let w = [-x / (r * c.sigma()), -y / (r * c.sigma())];
    let nu_tilde = phi_x.scale(w[0]).add(&phi_y.scale(w[1]));
    let at = plane_second_ff(&sp, x, y)?;
    let atilde_nn = w[0] * w[0] * at[(0, 0)] + w[0] * w[1] * (at[(0, 1)] + at[(1, 0)]) + w[1] * w[1] * at[(1, 1)];

    // ν = (rτ α' + E₃)/√a in the basis {α', E₃} of the cylinder form
    let b = cylinder_geometry(c).second_ff;
    let (u0, u1) = (r * tau / a.sqrt(), 1.0 / a.sqrt());
    let a_nn = u0 * u0 * b[(0, 0)] + 2.0 * u0 * u1 * b[(0, 1)] + u1 * u1 * b[(1, 1)];

    let cos_gamma = n.dot(&n_tilde);
    let gamma = cos_gamma.clamp(-1.0, 1.0).acos();
    let q = robin_coefficient(gamma, atilde_nn, a_nn)?;
    Ok(BoundaryFrame { point, n, n_tilde, nu, nu_tilde, cos_gamma, gamma, atilde_nn, a_nn, q })
}

/// Conormal derivative ∂u/∂ν = (rτ u_s + (1 + r²τ²) u_t)/√(1 + r²τ²) in the
/// cylinder coordinates (s, t).
pub fn conormal_derivative(c: &CircleData, u_s: f64, u_t: f64) -> f64 {
    let a = c.fiber_stiffness();
    (c.r() * c.tau() * u_s + a * u_t) / a.sqrt()
}

/// cos γ along the geodesic y = 0, at the model coordinate x = s.
pub fn contact_angle_geodesic(tau: f64, s: f64) -> f64 {
    s * tau / (1.0 + s * s * tau * tau).sqrt()
}

/// cos γ along a horocycle or equidistant curve, at polar angle θ about the
/// centre (0, −y₀) of its Euclidean circle.
pub fn contact_angle_equidistant(curve: &NonCircleData, theta: f64) -> Result<f64> {
    finite("theta", theta)?;
    let (Some(y0), Some(r)) = (curve.y0(), curve.r()) else {
        return Err(Error::InvalidExhaustionParams("the curve is a geodesic, not an offset circle".into()));
    };
    let (sin, cos) = theta.sin_cos();
    curve.space().check_xy(r * cos, -y0 + r * sin)?;
    let tau = curve.space().tau();
    Ok(y0 * tau * cos / (1.0 + tau * tau * (r * r + y0 * y0 - 2.0 * r * y0 * sin)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    /// x for geodesics, polar angle for offset circles.
    pub s: f64,
    pub cos_gamma: f64,
}

/// Samples cos γ at `samples` evenly spaced parameters in [lo, hi]; for
/// offset circles, parameters whose point falls outside the disk are skipped.
pub fn contact_angle_profile(curve: &NonCircleData, lo: f64, hi: f64, samples: usize) -> Result<Vec<ProfilePoint>> {
    finite("lo", lo)?;
    finite("hi", hi)?;
    if !(lo < hi) || samples < 2 {
        return Err(Error::InvalidInput(format!("need lo < hi and at least 2 samples, got [{lo}, {hi}] x {samples}")));
    }
    let tau = curve.space().tau();
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let cos_gamma = match curve.kind() {
            CurveKind::Geodesic => {
                curve.space().check_xy(s, 0.0)?;
                contact_angle_geodesic(tau, s)
            }
            _ => match contact_angle_equidistant(curve, s) {
                Ok(v) => v,
                Err(Error::PointOutsideDomain { .. }) => continue,
                Err(e) => return Err(e),
            },
        };
        out.push(ProfilePoint { s, cos_gamma });
    }
    Ok(out)
}

/// max − min of the sampled cos γ.
pub fn profile_oscillation(profile: &[ProfilePoint]) -> f64 {
    let hi = profile.iter().map(|p| p.cos_gamma).fold(f64::NEG_INFINITY, f64::max);
    let lo = profile.iter().map(|p| p.cos_gamma).fold(f64::INFINITY, f64::min);
    if profile.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Fraction of the disk radius used as the default exhaustion half-width.
pub const DEFAULT_EXHAUSTION_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionReport {
    pub min_eig: f64,
    pub tol_zero: f64,
    pub strongly_stable: bool,
    /// Half-length of the arclength interval that was discretised.
    pub half_width: f64,
    pub potential: f64,
}

/// Stability of a vertical cylinder over a non-closed curve in H²(κ)×ℝ
/// between two horizontal planes, with the default exhaustion radius.
pub fn partition_strong_stability(kappa: f64, kappa_g: f64, length: f64, grid: GridSize) -> Result<PartitionReport> {
    let disk = exhaustion_disk(kappa)?;
    partition_strong_stability_at(kappa, kappa_g, length, DEFAULT_EXHAUSTION_FRACTION * disk, grid)
}

/// As [`partition_strong_stability`] with the model-radius `s0` of the
/// exhaustion: the curve is cut to arclength ±ℓ where ℓ is the distance from
/// the origin to a point of model radius s0. The form ∫|∇u|² − (κ_g²+κ)u²
/// is discretised with Dirichlet data at the cut and Neumann data on both
/// planes.
pub fn partition_strong_stability_at(
    kappa: f64,
    kappa_g: f64,
    length: f64,
    s0: f64,
    grid: GridSize,
) -> Result<PartitionReport> {
    let disk = exhaustion_disk(kappa)?;
    finite("kappa_g", kappa_g)?;
    finite("length", length)?;
    finite("s0", s0)?;
    if !(length > 0.0) {
        return Err(Error::InvalidLength(length));
    }
    if !(s0 > 0.0 && s0 < disk) {
        return Err(Error::InvalidExhaustionParams(format!("s0 = {s0} must lie in (0, {disk})")));
    }
    if classify_curve(kappa, kappa_g).is_none() {
        return Err(Error::InvalidExhaustionParams(format!(
            "kappa_g^2 + kappa = {} > 0: the curve is a closed circle",
            kappa_g * kappa_g + kappa
        )));
    }
    let root = (-kappa).sqrt();
    let half_width = 2.0 / root * (0.5 * s0 * root).atanh();
    let potential = kappa_g * kappa_g + kappa;
    let problem = RectProblem {
        ns: grid.ns,
        nt: grid.nt,
        hs: 2.0 * half_width / grid.ns as f64,
        ht: length / grid.nt as f64,
        s_bc: SideBc::Dirichlet,
        t_bc: SideBc::Neumann,
        g11: 1.0,
        g12: 0.0,
        g22: 1.0,
        potential,
    };
    let df = DiscreteForm::from_rect(&problem);
    let min_eig = solve_smallest(&df, 1)?.eigenvalues[0];
    let tol_zero = df.zero_tolerance();
    Ok(PartitionReport { min_eig, tol_zero, strongly_stable: min_eig >= -tol_zero, half_width, potential })
}

fn exhaustion_disk(kappa: f64) -> Result<f64> {
    finite("kappa", kappa)?;
    SpaceParams::new(kappa, 0.0)?
        .disk_radius()
        .ok_or_else(|| Error::InvalidExhaustionParams(format!("needs kappa < 0, got {kappa}")))
}

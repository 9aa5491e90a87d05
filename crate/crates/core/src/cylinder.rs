//! Circles of constant geodesic curvature in M²(κ) and the vertical
//! cylinders over them.
//!
//! A circle is given either by its intrinsic radius ρ or by its radius r in
//! the model disk. All branch formulas (tan/identity/tanh and friends) switch
//! to Maclaurin series once |κ|ρ² drops below [`SERIES_THRESHOLD`], so κ = 0
//! is a removable singularity rather than a special case.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{finite, Error, Result};
use crate::geometry::{ricci_normal, SpaceParams, BOUNDARY_MARGIN};

pub const SERIES_THRESHOLD: f64 = 1e-8;

/// Intrinsic radii beyond this are reported as [`Error::Overflow`].
pub const RHO_OVERFLOW: f64 = 1e6;

fn check_kappa(kappa: f64) -> Result<f64> {
    finite("kappa", kappa)
}

/// Model radius r from the intrinsic radius ρ.
pub fn rho_to_r(kappa: f64, rho: f64) -> Result<f64> {
    let kappa = check_kappa(kappa)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidRadius(format!("rho must be positive, got {rho}")));
    }
    if kappa > 0.0 && rho >= std::f64::consts::PI / kappa.sqrt() {
        return Err(Error::InvalidRadius(format!(
            "rho = {rho} reaches the antipodal radius pi/sqrt(kappa) = {}",
            std::f64::consts::PI / kappa.sqrt()
        )));
    }
    let x = kappa * rho * rho;
    let r = if x.abs() < SERIES_THRESHOLD {
        rho * (1.0 + x / 12.0 + x * x / 120.0)
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        2.0 / k * (0.5 * rho * k).tanh()
    } else {
        let k = kappa.sqrt();
        2.0 / k * (0.5 * rho * k).tan()
    };
    Ok(r)
}

fn check_model_radius(kappa: f64, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidRadius(format!("r must be positive, got {r}")));
    }
    if kappa < 0.0 {
        let limit = 2.0 / (-kappa).sqrt();
        if r >= limit - BOUNDARY_MARGIN {
            return Err(Error::InvalidRadius(format!(
                "r = {r} must stay inside the model disk of radius {limit}"
            )));
        }
    }
    Ok(())
}

/// Intrinsic radius ρ from the model radius r.
pub fn r_to_rho(kappa: f64, r: f64) -> Result<f64> {
    let kappa = check_kappa(kappa)?;
    check_model_radius(kappa, r)?;
    let x = kappa * r * r;
    let rho = if x.abs() < SERIES_THRESHOLD {
        r * (1.0 - x / 12.0 + x * x / 80.0)
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        2.0 / k * (0.5 * r * k).atanh()
    } else {
        let k = kappa.sqrt();
        2.0 / k * (0.5 * r * k).atan()
    };
    if !rho.is_finite() || rho > RHO_OVERFLOW {
        return Err(Error::Overflow(rho));
    }
    Ok(rho)
}

/// κ_g = (4 − κr²)/(4r).
pub fn geodesic_curvature(kappa: f64, r: f64) -> Result<f64> {
    let kappa = check_kappa(kappa)?;
    check_model_radius(kappa, r)?;
    Ok((4.0 - kappa * r * r) / (4.0 * r))
}

/// The intrinsic form of κ_g: √−κ coth(ρ√−κ), 1/ρ or √κ cot(ρ√κ).
pub fn geodesic_curvature_from_rho(kappa: f64, rho: f64) -> f64 {
    let x = kappa * rho * rho;
    if x.abs() < SERIES_THRESHOLD {
        (1.0 - x / 3.0 - x * x / 45.0) / rho
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        k / (rho * k).tanh()
    } else {
        let k = kappa.sqrt();
        k / (rho * k).tan()
    }
}

/// R = rσ = 4r/(4 + κr²), so that the circle has length 2πR.
pub fn horizontal_radius(kappa: f64, r: f64) -> Result<f64> {
    let kappa = check_kappa(kappa)?;
    check_model_radius(kappa, r)?;
    Ok(4.0 * r / (4.0 + kappa * r * r))
}

/// The intrinsic form of R: sinh(ρ√−κ)/√−κ, ρ or sin(ρ√κ)/√κ.
pub fn horizontal_radius_from_rho(kappa: f64, rho: f64) -> f64 {
    let x = kappa * rho * rho;
    if x.abs() < SERIES_THRESHOLD {
        rho * (1.0 - x / 6.0 + x * x / 120.0)
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        (rho * k).sinh() / k
    } else {
        let k = kappa.sqrt();
        (rho * k).sin() / k
    }
}

/// A circle of M²(κ) centred at the origin of the model, with every derived
/// radius stored once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleData {
    sp: SpaceParams,
    rho: f64,
    r: f64,
    sigma: f64,
    kappa_g: f64,
    #[serde(rename = "R")]
    big_r: f64,
}

impl CircleData {
    pub fn from_rho(sp: SpaceParams, rho: f64) -> Result<Self> {
        let r = rho_to_r(sp.kappa(), rho)?;
        Self::build(sp, rho, r)
    }

    pub fn from_r(sp: SpaceParams, r: f64) -> Result<Self> {
        let rho = r_to_rho(sp.kappa(), r)?;
        Self::build(sp, rho, r)
    }

    /// The circle with prescribed geodesic curvature; fails with
    /// [`Error::NotACircle`] when κ_g² + κ ≤ 0.
    pub fn from_geodesic_curvature(sp: SpaceParams, kappa_g: f64) -> Result<Self> {
        finite("kappa_g", kappa_g)?;
        let c = kappa_g * kappa_g + sp.kappa();
        if c <= 0.0 {
            return Err(Error::NotACircle(c));
        }
        // positive root of κr² + 4κ_g r − 4 = 0, written without cancellation
        let r = 2.0 / (c.sqrt() + kappa_g);
        Self::from_r(sp, r)
    }

    fn build(sp: SpaceParams, rho: f64, r: f64) -> Result<Self> {
        check_model_radius(sp.kappa(), r)?;
        let kappa = sp.kappa();
        let sigma = 4.0 / (4.0 + kappa * r * r);
        let kappa_g = (4.0 - kappa * r * r) / (4.0 * r);
        let c = kappa_g * kappa_g + kappa;
        if c <= 0.0 {
            return Err(Error::NotACircle(c));
        }
        Ok(Self {
            sp,
            rho,
            r,
            sigma,
            kappa_g,
            big_r: r * sigma,
        })
    }

    pub fn space(&self) -> &SpaceParams {
        &self.sp
    }
    pub fn kappa(&self) -> f64 {
        self.sp.kappa()
    }
    pub fn tau(&self) -> f64 {
        self.sp.tau()
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn kappa_g(&self) -> f64 {
        self.kappa_g
    }
    /// Horizontal radius R; the circle has length 2πR.
    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    /// c = κ_g² + κ, the constant potential of the Jacobi operator.
    pub fn potential(&self) -> f64 {
        self.kappa_g * self.kappa_g + self.sp.kappa()
    }

    /// 1 + r²τ² = g^{22}, the stiffness of the fiber direction.
    pub fn fiber_stiffness(&self) -> f64 {
        let rt = self.r * self.sp.tau();
        1.0 + rt * rt
    }
}

/// Induced geometry of the vertical cylinder over a circle, in the
/// coordinates ψ(s, t) = (r cos(s/R), r sin(s/R), t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderGeom {
    pub first_ff: Matrix2<f64>,
    pub first_ff_inv: Matrix2<f64>,
    /// In the basis {α', E₃}.
    pub second_ff: Matrix2<f64>,
    pub mean_curvature: f64,
    pub norm_a2: f64,
    pub jacobi_potential: f64,
}

pub fn cylinder_geometry(c: &CircleData) -> CylinderGeom {
    let tau = c.tau();
    let rt = c.r() * tau;
    let kg = c.kappa_g();
    CylinderGeom {
        first_ff: Matrix2::new(1.0 + rt * rt, -rt, -rt, 1.0),
        first_ff_inv: Matrix2::new(1.0, rt, rt, 1.0 + rt * rt),
        second_ff: Matrix2::new(kg, tau, tau, 0.0),
        mean_curvature: 0.5 * kg,
        norm_a2: kg * kg + 2.0 * tau * tau,
        // |A|² + Ric(N) with the τ² terms cancelled symbolically
        jacobi_potential: c.potential(),
    }
}

impl CylinderGeom {
    /// |A|² + Ric(N) evaluated term by term, for cross-checking
    /// `jacobi_potential`.
    pub fn potential_from_curvatures(&self, sp: &SpaceParams) -> f64 {
        self.norm_a2 + ricci_normal(sp)
    }
}

/// The three kinds of non-closed curves with κ_g² + κ ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Geodesic,
    Horocycle,
    Equidistant,
}

/// A constant-curvature curve with κ_g² + κ ≤ 0 (geodesic, horocycle or
/// equidistant curve) whose vertical cylinder is not compact.
///
/// Non-geodesic curves are represented as the Euclidean circle of radius r
/// centred at (0, −y₀) in the model disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonCircleData {
    sp: SpaceParams,
    kappa_g: f64,
    kind: CurveKind,
    y0: Option<f64>,
    r: Option<f64>,
}

const HOROCYCLE_TOL: f64 = 1e-12;

impl NonCircleData {
    /// The geodesic through the origin along the x-axis.
    pub fn geodesic(sp: SpaceParams) -> Result<Self> {
        if sp.kappa() > 0.0 {
            return Err(Error::InvalidExhaustionParams(format!(
                "geodesics are closed circles when kappa = {} > 0",
                sp.kappa()
            )));
        }
        Ok(Self { sp, kappa_g: 0.0, kind: CurveKind::Geodesic, y0: None, r: None })
    }

    /// The Euclidean circle of radius `r` centred at (0, −y₀); requires
    /// κ < 0, y₀ ∈ (0, 2/√−κ] and a geodesic curvature with κ_g² + κ ≤ 0.
    pub fn offset_circle(sp: SpaceParams, r: f64, y0: f64) -> Result<Self> {
        let disk = sp.disk_radius().ok_or_else(|| {
            Error::InvalidExhaustionParams("horocycles and equidistant curves need kappa < 0".into())
        })?;
        finite("r", r)?;
        finite("y0", y0)?;
        if !(y0 > 0.0 && y0 <= disk) {
            return Err(Error::InvalidExhaustionParams(format!("y0 = {y0} must lie in (0, {disk}]")));
        }
        if !(r > 0.0 && r < disk + y0) {
            return Err(Error::InvalidExhaustionParams(format!(
                "r = {r} must lie below 2/sqrt(-kappa) + y0 = {} to meet the disk",
                disk + y0
            )));
        }
        let kappa = sp.kappa();
        let kappa_g = (4.0 + kappa * (y0 * y0 - r * r)) / (4.0 * r);
        let kind = classify_curve(kappa, kappa_g).ok_or_else(|| {
            Error::InvalidExhaustionParams(format!(
                "kappa_g = {kappa_g} gives kappa_g^2 + kappa > 0: the curve is a closed circle"
            ))
        })?;
        Ok(Self { sp, kappa_g, kind, y0: Some(y0), r: Some(r) })
    }

    pub fn space(&self) -> &SpaceParams {
        &self.sp
    }
    pub fn kappa_g(&self) -> f64 {
        self.kappa_g
    }
    pub fn kind(&self) -> CurveKind {
        self.kind
    }
    pub fn y0(&self) -> Option<f64> {
        self.y0
    }
    pub fn r(&self) -> Option<f64> {
        self.r
    }
}

/// Classifies a curvature with κ_g² + κ ≤ 0; `None` for circles.
pub fn classify_curve(kappa: f64, kappa_g: f64) -> Option<CurveKind> {
    let c = kappa_g * kappa_g + kappa;
    if kappa_g == 0.0 && kappa <= 0.0 {
        Some(CurveKind::Geodesic)
    } else if c.abs() <= HOROCYCLE_TOL * kappa.abs().max(f64::MIN_POSITIVE) {
        Some(CurveKind::Horocycle)
    } else if c < 0.0 {
        Some(CurveKind::Equidistant)
    } else {
        None
    }
}

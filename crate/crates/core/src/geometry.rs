//! Coordinate model of the homogeneous spaces E(κ, τ).
//!
//! The model is ℝ³ (κ ≥ 0) or D(2/√−κ) × ℝ (κ < 0) with coordinates
//! (x, y, z) and metric
//!
//! ```text
//! g = σ²(dx² + dy²) + (στ(y dx − x dy) + dz)²,   σ = 4 / (4 + κ(x² + y²)).
//! ```
//!
//! Tangent vectors are carried in components of the orthonormal frame
//! {E₁, E₂, E₃} ([`FrameVector`]); coordinate components only appear at the
//! API boundary. The closed-form connection table lives next to a
//! finite-difference Christoffel oracle ([`christoffel_fd`]) that recomputes
//! it from the metric alone.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::Serialize;

use crate::error::{finite, Error, Result};

/// Points closer than this to the boundary of the κ < 0 model disk are
/// rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-8;

/// Default step for the finite-difference oracles.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Finite-difference steps are capped at this fraction of the distance to
/// the disk boundary.
pub const FD_ROOM_FRACTION: f64 = 2e-4;

/// The pair (κ, τ) selecting the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceParams {
    kappa: f64,
    tau: f64,
}

impl SpaceParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        Ok(Self {
            kappa: finite("kappa", kappa)?,
            tau: finite("tau", tau)?,
        })
    }

    pub fn euclidean() -> Self {
        Self { kappa: 0.0, tau: 0.0 }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// κ > 0 and τ ≠ 0: the model is a Berger sphere minus one fiber.
    pub fn is_berger(&self) -> bool {
        self.kappa > 0.0 && self.tau != 0.0
    }

    /// Euclidean radius 2/√−κ of the model disk, `None` when κ ≥ 0.
    pub fn disk_radius(&self) -> Option<f64> {
        (self.kappa < 0.0).then(|| 2.0 / (-self.kappa).sqrt())
    }

    /// Length 8|τ|π/κ after which the fibers of a Berger sphere close up.
    pub fn fiber_period(&self) -> Option<f64> {
        self.is_berger()
            .then(|| 8.0 * self.tau.abs() * std::f64::consts::PI / self.kappa)
    }

    /// Conformal factor σ = 4/(4 + κ(x² + y²)).
    pub fn sigma(&self, x: f64, y: f64) -> f64 {
        4.0 / (4.0 + self.kappa * (x * x + y * y))
    }

    /// Closed-form partial derivatives (σ_x, σ_y) = −κσ²(x, y)/2.
    pub fn sigma_gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let s = self.sigma(x, y);
        let f = -0.5 * self.kappa * s * s;
        (f * x, f * y)
    }

    /// Validates that (x, y) lies in the model domain.
    pub fn check_xy(&self, x: f64, y: f64) -> Result<()> {
        finite("x", x)?;
        finite("y", y)?;
        if let Some(radius) = self.disk_radius() {
            if (x * x + y * y).sqrt() >= radius - BOUNDARY_MARGIN {
                return Err(Error::PointOutsideDomain { x, y, radius });
            }
        }
        Ok(())
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        finite("z", p.z)?;
        self.check_xy(p.x, p.y)
    }
}

/// Model coordinates (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    fn shifted(&self, axis: usize, h: f64) -> Point {
        let mut q = *self;
        match axis {
            0 => q.x += h,
            1 => q.y += h,
            _ => q.z += h,
        }
        q
    }
}

/// A tangent vector in components of the orthonormal frame {E₁, E₂, E₃}.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FrameVector(pub [f64; 3]);

impl FrameVector {
    pub const E1: FrameVector = FrameVector([1.0, 0.0, 0.0]);
    pub const E2: FrameVector = FrameVector([0.0, 1.0, 0.0]);
    pub const E3: FrameVector = FrameVector([0.0, 0.0, 1.0]);

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self([a, b, c])
    }

    /// The metric inner product; the frame is orthonormal so this is the
    /// Euclidean dot product of the components.
    pub fn dot(&self, other: &FrameVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> FrameVector {
        FrameVector(self.0.map(|a| a * s))
    }

    pub fn add(&self, other: &FrameVector) -> FrameVector {
        FrameVector([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }

    pub fn sub(&self, other: &FrameVector) -> FrameVector {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }
}

/// Riemannian cross product, oriented so that E₁ × E₂ = E₃.
pub fn cross(u: &FrameVector, v: &FrameVector) -> FrameVector {
    let [a1, a2, a3] = u.0;
    let [b1, b2, b3] = v.0;
    FrameVector([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
}

/// Cross product of two vectors given in coordinate components; the result
/// is returned in coordinate components as well.
pub fn cross_coords(
    sp: &SpaceParams,
    p: &Point,
    u: &Vector3<f64>,
    v: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    let fu = coords_to_frame(sp, p, u)?;
    let fv = coords_to_frame(sp, p, v)?;
    frame_to_coords(sp, p, &cross(&fu, &fv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAtPoint {
    pub g: Matrix3<f64>,
    pub sigma: f64,
}

impl MetricAtPoint {
    pub fn inner(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        u.dot(&(self.g * v))
    }
}

pub fn metric_tensor(sp: &SpaceParams, p: &Point) -> Result<MetricAtPoint> {
    sp.check(p)?;
    Ok(metric_unchecked(sp, p))
}

fn metric_unchecked(sp: &SpaceParams, p: &Point) -> MetricAtPoint {
    let (x, y) = (p.x, p.y);
    let s = sp.sigma(x, y);
    let t = sp.tau;
    let s2 = s * s;
    let t2 = t * t;
    let gxy = -s2 * t2 * x * y;
    let gxz = s * t * y;
    let gyz = -s * t * x;
    let g = Matrix3::new(
        s2 * (1.0 + t2 * y * y),
        gxy,
        gxz,
        gxy,
        s2 * (1.0 + t2 * x * x),
        gyz,
        gxz,
        gyz,
        1.0,
    );
    MetricAtPoint { g, sigma: s }
}

/// Coordinate components of E₁, E₂, E₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAtPoint {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub e3: Vector3<f64>,
}

impl FrameAtPoint {
    pub fn get(&self, i: usize) -> &Vector3<f64> {
        match i {
            0 => &self.e1,
            1 => &self.e2,
            _ => &self.e3,
        }
    }
}

pub fn frame(sp: &SpaceParams, p: &Point) -> Result<FrameAtPoint> {
    sp.check(p)?;
    Ok(frame_unchecked(sp, p))
}

fn frame_unchecked(sp: &SpaceParams, p: &Point) -> FrameAtPoint {
    let s = sp.sigma(p.x, p.y);
    FrameAtPoint {
        e1: Vector3::new(1.0 / s, 0.0, -sp.tau * p.y),
        e2: Vector3::new(0.0, 1.0 / s, sp.tau * p.x),
        e3: Vector3::new(0.0, 0.0, 1.0),
    }
}

/// Converts coordinate components to frame components using
/// ∂x = σ(E₁ + τyE₃), ∂y = σ(E₂ − τxE₃), ∂z = E₃.
pub fn coords_to_frame(sp: &SpaceParams, p: &Point, v: &Vector3<f64>) -> Result<FrameVector> {
    sp.check(p)?;
    let s = sp.sigma(p.x, p.y);
    let t = sp.tau;
    Ok(FrameVector([
        s * v[0],
        s * v[1],
        v[2] + s * t * (p.y * v[0] - p.x * v[1]),
    ]))
}

pub fn frame_to_coords(sp: &SpaceParams, p: &Point, v: &FrameVector) -> Result<Vector3<f64>> {
    let f = frame(sp, p)?;
    Ok(f.e1 * v.0[0] + f.e2 * v.0[1] + f.e3 * v.0[2])
}

/// Frame coefficients of ∇̄_{E_i}E_j, indexed `[i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionTable(pub [[FrameVector; 3]; 3]);

impl ConnectionTable {
    pub fn get(&self, i: usize, j: usize) -> &FrameVector {
        &self.0[i][j]
    }

    /// ∇̄_X E_j for X in frame components.
    pub fn along(&self, x: &FrameVector, j: usize) -> FrameVector {
        (0..3).fold(FrameVector::default(), |acc, i| {
            acc.add(&self.0[i][j].scale(x.0[i]))
        })
    }

    pub fn max_abs_diff(&self, other: &ConnectionTable) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max(self.0[i][j].sub(&other.0[i][j]).max_abs());
            }
        }
        m
    }
}

/// The closed-form Levi-Civita connection in the frame {E₁, E₂, E₃}.
pub fn connection_table(sp: &SpaceParams, p: &Point) -> Result<ConnectionTable> {
    sp.check(p)?;
    let s = sp.sigma(p.x, p.y);
    let (sx, sy) = sp.sigma_gradient(p.x, p.y);
    let a = sx / (s * s);
    let b = sy / (s * s);
    let t = sp.tau;
    let v = FrameVector::new;
    Ok(ConnectionTable([
        [v(0.0, -b, 0.0), v(b, 0.0, t), v(0.0, -t, 0.0)],
        [v(0.0, a, -t), v(-a, 0.0, 0.0), v(t, 0.0, 0.0)],
        [v(0.0, -t, 0.0), v(t, 0.0, 0.0), v(0.0, 0.0, 0.0)],
    ]))
}

/// Coordinate Christoffel symbols Γ^k_ij, indexed `[k][i][j]`.
pub type Christoffel = [[[f64; 3]; 3]; 3];

/// Shrinks `h` so that the ±h stencil in x and y stays inside the model
/// domain; fails if there is no room at all.
fn stencil_step(sp: &SpaceParams, p: &Point, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("finite-difference step must be positive, got {h}")));
    }
    sp.check(p)?;
    match sp.disk_radius() {
        None => Ok(h),
        Some(radius) => {
            let room = radius - BOUNDARY_MARGIN - (p.x * p.x + p.y * p.y).sqrt();
            // σ varies on the scale of `room`, so the step must be a small fraction of it
            let h_eff = h.min(FD_ROOM_FRACTION * room);
            if h_eff > 0.0 {
                Ok(h_eff)
            } else {
                Err(Error::PointOutsideDomain { x: p.x, y: p.y, radius })
            }
        }
    }
}

/// Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij) with central differences
/// of [`metric_tensor`].
pub fn christoffel_coordinates_fd(sp: &SpaceParams, p: &Point, h: f64) -> Result<Christoffel> {
    let h = stencil_step(sp, p, h)?;
    let mut dg = [Matrix3::zeros(); 3];
    for (axis, d) in dg.iter_mut().enumerate() {
        let plus = metric_tensor(sp, &p.shifted(axis, h))?.g;
        let minus = metric_tensor(sp, &p.shifted(axis, -h))?.g;
        *d = (plus - minus) / (2.0 * h);
    }
    let ginv = metric_unchecked(sp, p)
        .g
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("singular metric".into()))?;
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for (i, gki) in gk.iter_mut().enumerate() {
            for (j, out) in gki.iter_mut().enumerate() {
                *out = 0.5
                    * (0..3)
                        .map(|l| ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                        .sum::<f64>();
            }
        }
    }
    Ok(gamma)
}

/// ∇̄_X V in coordinate components for a vector field `field` given in
/// coordinate components, with the field's derivatives taken by central
/// differences.
pub fn covariant_derivative_fd<F>(
    sp: &SpaceParams,
    p: &Point,
    x: &Vector3<f64>,
    field: F,
    h: f64,
) -> Result<Vector3<f64>>
where
    F: Fn(&Point) -> Result<Vector3<f64>>,
{
    let h = stencil_step(sp, p, h)?;
    let gamma = christoffel_coordinates_fd(sp, p, h)?;
    let v = field(p)?;
    let mut out = Vector3::zeros();
    for a in 0..3 {
        if x[a] == 0.0 {
            continue;
        }
        let dv = (field(&p.shifted(a, h))? - field(&p.shifted(a, -h))?) / (2.0 * h);
        out += dv * x[a];
    }
    for k in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                out[k] += gamma[k][a][b] * x[a] * v[b];
            }
        }
    }
    Ok(out)
}

/// Finite-difference oracle for [`connection_table`]: builds ∇̄_{E_i}E_j from
/// coordinate Christoffel symbols and differentiated frame fields, then reads
/// off frame coefficients through the metric.
pub fn christoffel_fd(sp: &SpaceParams, p: &Point, h: f64) -> Result<ConnectionTable> {
    let fr = frame(sp, p)?;
    let metric = metric_unchecked(sp, p);
    let mut table = [[FrameVector::default(); 3]; 3];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let d = covariant_derivative_fd(sp, p, fr.get(i), |q| Ok(*frame(sp, q)?.get(j)), h)?;
            *entry = FrameVector([
                metric.inner(&d, &fr.e1),
                metric.inner(&d, &fr.e2),
                metric.inner(&d, &fr.e3),
            ]);
        }
    }
    Ok(ConnectionTable(table))
}

/// Ric(N) = κ − 2τ² for the unit normal of a vertical cylinder.
pub fn ricci_normal(sp: &SpaceParams) -> f64 {
    sp.kappa - 2.0 * sp.tau * sp.tau
}

/// The isometry Ψ of the model onto the Berger sphere minus a fiber, as
/// (Re z, Im z, Re w, Im w) with |z|² + |w|² = 1.
pub fn berger_embedding(sp: &SpaceParams, p: &Point) -> Result<[f64; 4]> {
    if !sp.is_berger() {
        return Err(Error::NotBergerSpace { kappa: sp.kappa, tau: sp.tau });
    }
    sp.check(p)?;
    let k = sp.kappa;
    let f = 1.0 / (1.0 + 0.25 * k * (p.x * p.x + p.y * p.y)).sqrt();
    let (sin, cos) = (k * p.z / (4.0 * sp.tau)).sin_cos();
    let a = 0.5 * k.sqrt() * f;
    Ok([
        a * (p.x * cos - p.y * sin),
        a * (p.x * sin + p.y * cos),
        f * cos,
        f * sin,
    ])
}

/// Draws a point inside the model domain: the disk of 90% the boundary
/// radius when κ < 0, the square [−2, 2]² otherwise; z ∈ [−5, 5].
pub fn random_point<R: Rng + ?Sized>(sp: &SpaceParams, rng: &mut R) -> Point {
    let z = rng.random_range(-5.0..5.0);
    match sp.disk_radius() {
        Some(radius) => {
            let rho = 0.9 * radius * rng.random::<f64>().sqrt();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            Point::new(rho * phi.cos(), rho * phi.sin(), z)
        }
        None => Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), z),
    }
}

/// A random unit vector in frame components.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> FrameVector {
    loop {
        let v = FrameVector::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v.scale(1.0 / n);
        }
    }
}

/// max |E_i·g·E_j − δ_ij| at `p`.
pub fn frame_orthonormality_residual(sp: &SpaceParams, p: &Point) -> Result<f64> {
    let m = metric_tensor(sp, p)?;
    let f = frame_unchecked(sp, p);
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m.inner(f.get(i), f.get(j)) - delta).abs());
        }
    }
    Ok(worst)
}

/// max |∇̄_X E₃ − τ X × E₃| over the frame directions X = E₁, E₂, E₃ and the
/// supplied extra directions, with ∇̄ taken from the finite-difference path.
pub fn killing_residual(sp: &SpaceParams, p: &Point, extra: &[FrameVector], h: f64) -> Result<f64> {
    let metric = metric_tensor(sp, p)?;
    let fr = frame_unchecked(sp, p);
    let mut dirs = vec![FrameVector::E1, FrameVector::E2, FrameVector::E3];
    dirs.extend_from_slice(extra);
    let mut worst = 0.0_f64;
    for x in &dirs {
        let xc = frame_to_coords(sp, p, x)?;
        let d = covariant_derivative_fd(sp, p, &xc, |_| Ok(Vector3::new(0.0, 0.0, 1.0)), h)?;
        let got = FrameVector([
            metric.inner(&d, &fr.e1),
            metric.inner(&d, &fr.e2),
            metric.inner(&d, &fr.e3),
        ]);
        let want = cross(x, &FrameVector::E3).scale(sp.tau);
        worst = worst.max(got.sub(&want).max_abs());
    }
    Ok(worst)
}

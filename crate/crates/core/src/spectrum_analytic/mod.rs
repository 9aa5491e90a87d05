//! Closed-form spectrum of the Jacobi operator on a truncated vertical
//! cylinder, restricted to variations that do not depend on the angular
//! coordinate s.
//!
//! With a = 1 + r²τ² and c = κ_g² + κ, the separated modes are
//! u = sin(nπt/L) (Dirichlet, n ≥ 1) or cos(nπt/L) (Neumann, n ≥ 0) with
//! λ_n = a·n²π²/L² − c. The critical length L₀ = 2π√(a/c) is where λ₂ = 0.
//!
//! Modes that vary in s are not covered here. When τ ≠ 0 some of them can be
//! negative as well (see [`crate::spectrum_numeric`]), so the indices below
//! are indices of the axially symmetric problem.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cylinder::{horizontal_radius_from_rho, CircleData, SERIES_THRESHOLD};
use crate::error::{finite, Error, Result};
use crate::geometry::SpaceParams;

mod exhaustion;

pub use exhaustion::{noncompact_geodesic_problem, ExhaustionProblem};

/// Relative guard band for sign decisions on closed-form eigenvalues.
pub const GUARD_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }

    /// Smallest admissible mode number.
    pub fn first_mode(self) -> i64 {
        match self {
            BoundaryCondition::Dirichlet => 1,
            BoundaryCondition::Neumann => 0,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::InvalidInput(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Fiber period 8|τ|π/κ of a Berger sphere.
pub fn berger_period(sp: &SpaceParams) -> Result<f64> {
    sp.fiber_period().ok_or(Error::NotBergerSpace { kappa: sp.kappa(), tau: sp.tau() })
}

/// The piece of the vertical cylinder over `circle` between heights 0 and L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedCylinder {
    circle: CircleData,
    length: f64,
    bc: BoundaryCondition,
}

impl TruncatedCylinder {
    /// Fails on non-positive lengths and, in Berger spheres, on lengths that
    /// reach the fiber period (the surface would overlap itself).
    pub fn new(circle: CircleData, length: f64, bc: BoundaryCondition) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidLength(length));
        }
        if let Some(period) = circle.space().fiber_period() {
            if length >= period {
                return Err(Error::BergerPeriodExceeded { length, period });
            }
        }
        Ok(Self { circle, length, bc })
    }

    pub fn circle(&self) -> &CircleData {
        &self.circle
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// Same cylinder with a different boundary condition.
    pub fn with_bc(&self, bc: BoundaryCondition) -> Self {
        Self { bc, ..*self }
    }
}

/// L₀ = 2π√((1 + r²τ²)/(κ_g² + κ)).
pub fn critical_length(c: &CircleData) -> f64 {
    2.0 * std::f64::consts::PI * (c.fiber_stiffness() / c.potential()).sqrt()
}

/// L₀ from the intrinsic radius ρ through the trigonometric / polynomial /
/// hyperbolic closed forms, independently of the stored circle data.
pub fn critical_length_branches(kappa: f64, tau: f64, rho: f64) -> f64 {
    use std::f64::consts::PI;
    let x = kappa * rho * rho;
    if x.abs() < SERIES_THRESHOLD {
        let r = rho * (1.0 + x / 12.0 + x * x / 120.0);
        2.0 * PI * horizontal_radius_from_rho(kappa, rho) * (1.0 + tau * tau * r * r).sqrt()
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        let th = (0.5 * rho * k).tanh();
        2.0 * PI / -kappa * (rho * k).sinh() * (-kappa + 4.0 * tau * tau * th * th).sqrt()
    } else {
        let k = kappa.sqrt();
        let tn = (0.5 * rho * k).tan();
        2.0 * PI / kappa * (rho * k).sin() * (kappa + 4.0 * tau * tau * tn * tn).sqrt()
    }
}

fn mode_eigenvalue(tc: &TruncatedCylinder, n: f64) -> f64 {
    let w = n * std::f64::consts::PI / tc.length;
    tc.circle.fiber_stiffness() * w * w - tc.circle.potential()
}

/// λ_n = (n²π²/L²)(1 + r²τ²) − (κ_g² + κ).
pub fn eigenvalue_n(tc: &TruncatedCylinder, n: i64) -> Result<f64> {
    if n < tc.bc.first_mode() {
        return Err(Error::InvalidMode { n, bc: tc.bc.name() });
    }
    Ok(mode_eigenvalue(tc, n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub n: i64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Ascending in n and in λ.
    pub eigenvalues: Vec<Mode>,
    pub morse_index: usize,
    pub weak_index_axisym: usize,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Ratio L/L₀; mode n is negative iff n < 2L/L₀.
fn length_ratio(tc: &TruncatedCylinder) -> f64 {
    tc.length / critical_length(&tc.circle)
}

/// Number of positive integers n with n < bound, ties and near-ties (within
/// the guard band) excluded.
fn count_below(bound: f64) -> usize {
    if bound <= 1.0 {
        return 0;
    }
    let mut n = bound.floor() as usize;
    while n >= 1 && (n as f64) * (1.0 + GUARD_BAND) >= bound {
        n -= 1;
    }
    n
}

/// Positive roots of tan x = x, in increasing order, below `bound`.
fn tan_fixed_points_below(bound: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut roots = Vec::new();
    for k in 1.. {
        // the k-th root lies in (kπ, kπ + π/2), where x cos x − sin x changes sign
        let (mut lo, mut hi) = (k as f64 * PI, (k as f64 + 0.5) * PI);
        if lo >= bound {
            break;
        }
        let f = |x: f64| x * x.cos() - x.sin();
        let f_lo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        let root = 0.5 * (lo + hi);
        if root * (1.0 + GUARD_BAND) < bound {
            roots.push(root);
        } else {
            break;
        }
    }
    roots
}

/// Axially symmetric Morse index: number of admissible n with λ_n < 0.
pub fn morse_index_axisym(tc: &TruncatedCylinder) -> usize {
    let below = count_below(2.0 * length_ratio(tc));
    match tc.bc {
        BoundaryCondition::Dirichlet => below,
        // the constant mode has λ₀ = −c < 0
        BoundaryCondition::Neumann => below + 1,
    }
}

/// Axially symmetric weak index: negative directions among mean-zero
/// functions of t.
///
/// Dirichlet: the constrained eigenfunctions are sin(2mπt/L) together with
/// the symmetric profiles with frequency 2x/L, where x solves tan x = x.
/// Neumann: every cos(nπt/L) with n ≥ 1 already has zero mean.
pub fn weak_index_axisym(tc: &TruncatedCylinder) -> usize {
    let q = length_ratio(tc);
    match tc.bc {
        BoundaryCondition::Dirichlet => count_below(q) + tan_fixed_points_below(std::f64::consts::PI * q).len(),
        BoundaryCondition::Neumann => count_below(2.0 * q),
    }
}

/// Modes n ≤ n_max, extended as far as needed so that every negative mode
/// is listed.
pub fn spectrum(tc: &TruncatedCylinder, n_max: i64) -> Result<SpectrumResult> {
    if n_max < 2 {
        return Err(Error::InvalidMode { n: n_max, bc: tc.bc.name() });
    }
    let negatives = count_below(2.0 * length_ratio(tc)) as i64;
    let last = n_max.max(negatives);
    let eigenvalues = (tc.bc.first_mode()..=last)
        .map(|n| Mode { n, lambda: mode_eigenvalue(tc, n as f64) })
        .collect();
    Ok(SpectrumResult {
        eigenvalues,
        morse_index: morse_index_axisym(tc),
        weak_index_axisym: weak_index_axisym(tc),
        lambda1: mode_eigenvalue(tc, 1.0),
        lambda2: mode_eigenvalue(tc, 2.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisymVerdict {
    StronglyStable,
    StableNotStronglyStable,
    Unstable,
}

/// Verdict for arbitrary variations. There is no "stable" outcome: the
/// available criterion only detects instability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeneralVerdict {
    Unstable,
    CriterionInconclusive,
}

impl AxisymVerdict {
    pub fn name(self) -> &'static str {
        match self {
            AxisymVerdict::StronglyStable => "StronglyStable",
            AxisymVerdict::StableNotStronglyStable => "StableNotStronglyStable",
            AxisymVerdict::Unstable => "Unstable",
        }
    }
}

impl GeneralVerdict {
    pub fn name(self) -> &'static str {
        match self {
            GeneralVerdict::Unstable => "Unstable",
            GeneralVerdict::CriterionInconclusive => "CriterionInconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub axisym: AxisymVerdict,
    pub general: GeneralVerdict,
    #[serde(rename = "L0")]
    pub l0: f64,
    pub berger_period: Option<f64>,
    /// λ₂ < 0, i.e. L > L₀: the instability test with the mean-zero witness
    /// sin(2πt/L) or cos(2πt/L).
    pub lambda2_criterion: bool,
}

/// Dirichlet: strongly stable iff L ≤ L₀/2, stable iff L ≤ L₀ (both
/// inclusive).
///
/// Neumann: the constant mode is always negative, so the cylinder is never
/// strongly stable; cos(πt/L) has zero mean, so it is stable iff L ≤ L₀/2.
pub fn classify(tc: &TruncatedCylinder) -> Result<StabilityVerdict> {
    let l0 = critical_length(&tc.circle);
    let l = tc.length;
    let berger = tc.circle.space().fiber_period();
    if let Some(period) = berger {
        if l >= period {
            return Err(Error::BergerPeriodExceeded { length: l, period });
        }
    }
    let axisym = match tc.bc {
        BoundaryCondition::Dirichlet => {
            if l <= 0.5 * l0 {
                AxisymVerdict::StronglyStable
            } else if l <= l0 {
                AxisymVerdict::StableNotStronglyStable
            } else {
                AxisymVerdict::Unstable
            }
        }
        BoundaryCondition::Neumann => {
            if l <= 0.5 * l0 {
                AxisymVerdict::StableNotStronglyStable
            } else {
                AxisymVerdict::Unstable
            }
        }
    };
    // axially symmetric variations are admissible variations
    let general = if axisym == AxisymVerdict::Unstable {
        GeneralVerdict::Unstable
    } else {
        GeneralVerdict::CriterionInconclusive
    };
    Ok(StabilityVerdict { axisym, general, l0, berger_period: berger, lambda2_criterion: l > l0 })
}

/// Convenience constructor used by the CLI and the examples.
pub fn cylinder_from_rho(kappa: f64, tau: f64, rho: f64, length: f64, bc: BoundaryCondition) -> Result<TruncatedCylinder> {
    let sp = SpaceParams::new(finite("kappa", kappa)?, finite("tau", tau)?)?;
    TruncatedCylinder::new(CircleData::from_rho(sp, rho)?, length, bc)
}

//! Eigenproblem on compact pieces of the cylinder over a geodesic of H²(κ).
//!
//! Along the geodesic x ↦ (x, 0) of the model disk, separating
//! u = f(x)·sin(kπt/L) turns the Jacobi eigenproblem into the weighted
//! Sturm–Liouville problem
//!
//!   −f'' + σ²(k²π²/L² − κ) f = λ σ² f,   f(±s₀) = 0,
//!
//! with σ(x) = 4/(4 + κx²). It is solved by second-order finite differences,
//! bisection on the Sturm count and one Richardson step.

use serde::Serialize;

use crate::error::{finite, Error, Result};

const DEFAULT_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExhaustionProblem {
    kappa: f64,
    length: f64,
    s0: f64,
    k: u32,
}

impl ExhaustionProblem {
    /// Requires κ < 0, L > 0 and 0 < s₀ < 2/√−κ. `k = 0` is the mode that is
    /// constant along the fibers.
    pub fn new(kappa: f64, length: f64, s0: f64, k: u32) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidExhaustionParams(msg));
        finite("kappa", kappa)?;
        finite("L", length)?;
        finite("s0", s0)?;
        if kappa >= 0.0 {
            return bad(format!("kappa must be negative, got {kappa}"));
        }
        if length <= 0.0 {
            return bad(format!("L must be positive, got {length}"));
        }
        let edge = 2.0 / (-kappa).sqrt();
        if !(s0 > 0.0 && s0 < edge) {
            return bad(format!("s0 = {s0} must lie in (0, {edge})"));
        }
        Ok(Self { kappa, length, s0, k })
    }

    fn sigma(&self, x: f64) -> f64 {
        4.0 / (4.0 + self.kappa * x * x)
    }

    /// Constant part of the potential, k²π²/L² − κ > 0.
    fn shift(&self) -> f64 {
        let w = self.k as f64 * std::f64::consts::PI / self.length;
        w * w - self.kappa
    }

    /// Symmetrised FD matrix D⁻¹AD⁻¹ (D = diag σᵢ) as diagonal and
    /// off-diagonal arrays.
    fn tridiagonal(&self, intervals: usize) -> (Vec<f64>, Vec<f64>) {
        let h = 2.0 * self.s0 / intervals as f64;
        let inv_h2 = 1.0 / (h * h);
        let sig: Vec<f64> = (1..intervals).map(|i| self.sigma(-self.s0 + i as f64 * h)).collect();
        let q = self.shift();
        let diag = sig.iter().map(|s| 2.0 * inv_h2 / (s * s) + q).collect();
        let off = sig.windows(2).map(|w| -inv_h2 / (w[0] * w[1])).collect();
        (diag, off)
    }

    /// n-th eigenvalue (n ≥ 1) of the FD problem with the given number of
    /// intervals.
    pub fn fd_eigenvalue(&self, n: usize, intervals: usize) -> Result<f64> {
        if n == 0 || intervals < 8 || n >= intervals {
            return Err(Error::InvalidExhaustionParams(format!(
                "need 1 <= n < intervals and intervals >= 8, got n = {n}, intervals = {intervals}"
            )));
        }
        let (diag, off) = self.tridiagonal(intervals);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..diag.len() {
            let radius = off.get(i).map_or(0.0, |e| e.abs()) + if i > 0 { off[i - 1].abs() } else { 0.0 };
            lo = lo.min(diag[i] - radius);
            hi = hi.max(diag[i] + radius);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(&diag, &off, mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// n-th eigenvalue, Richardson-extrapolated from N and 2N intervals.
    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        let coarse = self.fd_eigenvalue(n, DEFAULT_INTERVALS)?;
        let fine = self.fd_eigenvalue(n, 2 * DEFAULT_INTERVALS)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i > 0 { off[i - 1] * off[i - 1] / q } else { 0.0 };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The n-th eigenvalue of the exhaustion problem for fiber mode k.
pub fn noncompact_geodesic_problem(kappa: f64, length: f64, s0: f64, k: u32, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidExhaustionParams("n must be at least 1".into()));
    }
    ExhaustionProblem::new(kappa, length, s0, k)?.eigenvalue(n as usize)
}

//! Discrete spectral oracle for the Jacobi operator of a truncated cylinder.
//!
//! The stability form Q[u] = ∫ |∇u|² − c u² is discretised directly on the
//! coordinate rectangle [0, 2πR) × [0, L] (periodic in s), giving a symmetric
//! stiffness matrix K and a lumped diagonal mass M. Eigenpairs of K v = λ M v
//! approximate the Jacobi spectrum to second order in the mesh size.
//!
//! Unlike the closed-form module this sees every mode, including those that
//! vary in s. For τ ≠ 0 a mode e^{iks/R} has
//! λ = a·n²π²/L² + (k²/a − 1)/R² with a = 1 + r²τ², which is negative for
//! k = 1 on long cylinders; numeric indices can therefore exceed the axially
//! symmetric ones.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum_analytic::{eigenvalue_n, BoundaryCondition, TruncatedCylinder};

mod banded;
mod eigen;
mod sparse;

pub use eigen::{DENSE_LIMIT, RESIDUAL_TOL};
pub use sparse::{SideBc, SymCsr};

use banded::folded_ring;
use eigen::Problem;
pub(crate) use sparse::RectProblem;

/// Eigenvalues within `ZERO_TOL_FACTOR · ‖K‖∞` of zero count as zero.
pub const ZERO_TOL_FACTOR: f64 = 1e-8;

pub const MIN_CELLS: usize = 8;

/// Number of cells in each direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GridSize {
    pub ns: usize,
    pub nt: usize,
}

impl GridSize {
    pub fn new(ns: usize, nt: usize) -> Result<Self> {
        if ns < MIN_CELLS || nt < MIN_CELLS {
            return Err(Error::GridTooCoarse { ns, nt });
        }
        Ok(Self { ns, nt })
    }

    pub fn doubled(self) -> Self {
        Self { ns: 2 * self.ns, nt: 2 * self.nt }
    }
}

impl Default for GridSize {
    fn default() -> Self {
        Self { ns: 64, nt: 64 }
    }
}

impl fmt::Display for GridSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.ns, self.nt)
    }
}

impl FromStr for GridSize {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("grid must look like 64x64, got `{s}`"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let ns = a.trim().parse().map_err(|_| bad())?;
        let nt = b.trim().parse().map_err(|_| bad())?;
        Self::new(ns, nt)
    }
}

/// Mesh on [0, 2πR) × [0, L].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub ns: usize,
    pub nt: usize,
    pub hs: f64,
    pub ht: f64,
}

impl Grid {
    pub fn new(tc: &TruncatedCylinder, size: GridSize) -> Result<Self> {
        let size = GridSize::new(size.ns, size.nt)?;
        Ok(Self {
            ns: size.ns,
            nt: size.nt,
            hs: 2.0 * std::f64::consts::PI * tc.circle().big_r() / size.ns as f64,
            ht: tc.length() / size.nt as f64,
        })
    }

    pub fn dof(&self, bc: BoundaryCondition) -> usize {
        match bc {
            BoundaryCondition::Dirichlet => self.ns * (self.nt - 1),
            BoundaryCondition::Neumann => self.ns * (self.nt + 1),
        }
    }
}

/// Stiffness/mass pair of the discretised stability form.
#[derive(Debug, Clone)]
pub struct DiscreteForm {
    stiffness: SymCsr,
    mass: Vec<f64>,
    s_nodes: Vec<f64>,
    t_nodes: Vec<f64>,
    s_bc: SideBc,
    t_bc: SideBc,
    potential: f64,
    band_order: Vec<usize>,
}

impl DiscreteForm {
    pub(crate) fn from_rect(problem: &RectProblem) -> Self {
        let a = problem.assemble();
        let n_s = a.s_nodes.len();
        let rows = a.t_nodes.len();
        let band_order = if problem.s_bc == SideBc::Periodic {
            let ring = folded_ring(n_s);
            (0..rows).flat_map(|j| ring.iter().map(move |&i| j * n_s + i)).collect()
        } else {
            (0..n_s * rows).collect()
        };
        Self {
            stiffness: a.stiffness,
            mass: a.mass,
            s_nodes: a.s_nodes,
            t_nodes: a.t_nodes,
            s_bc: problem.s_bc,
            t_bc: problem.t_bc,
            potential: problem.potential,
            band_order,
        }
    }

    pub fn stiffness(&self) -> &SymCsr {
        &self.stiffness
    }
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
    pub fn dof(&self) -> usize {
        self.mass.len()
    }
    /// s coordinates of the unknowns along one row.
    pub fn s_nodes(&self) -> &[f64] {
        &self.s_nodes
    }
    /// t coordinates of the rows of unknowns.
    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }
    pub fn s_bc(&self) -> SideBc {
        self.s_bc
    }
    pub fn t_bc(&self) -> SideBc {
        self.t_bc
    }

    /// tol_zero = 1e-8·‖K‖∞.
    pub fn zero_tolerance(&self) -> f64 {
        ZERO_TOL_FACTOR * self.stiffness.norm_inf()
    }

    /// Samples f(s, t) at the unknowns.
    pub fn grid_function(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.t_nodes.iter().flat_map(|&t| self.s_nodes.iter().map(move |&s| (s, t))).map(|(s, t)| f(s, t)).collect()
    }

    /// Quadrature mean 1ᵀMu / 1ᵀM1.
    pub fn mean(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        let total: f64 = self.mass.iter().sum();
        Ok(u.iter().zip(&self.mass).map(|(x, m)| x * m).sum::<f64>() / total)
    }

    /// Relative size of the part of `u` that varies along s.
    pub fn s_variation(&self, u: &[f64]) -> f64 {
        let n_s = self.s_nodes.len();
        let mut varying = 0.0;
        let mut total = 0.0;
        for row in u.chunks(n_s) {
            let mean = row.iter().sum::<f64>() / n_s as f64;
            varying += row.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
            total += row.iter().map(|x| x * x).sum::<f64>();
        }
        if total == 0.0 {
            0.0
        } else {
            (varying / total).sqrt()
        }
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dof() {
            return Err(Error::DimensionMismatch { expected: self.dof(), got: u.len() });
        }
        Ok(())
    }

    fn problem(&self, mean_zero: bool) -> Problem<'_> {
        Problem {
            stiffness: &self.stiffness,
            mass: &self.mass,
            band_order: &self.band_order,
            mean_zero,
            // the gradient part is positive semidefinite
            lower_bound: -self.potential.max(0.0),
        }
    }
}

/// Discretises Q on the cylinder's coordinate rectangle, periodic in s.
pub fn assemble(tc: &TruncatedCylinder, size: GridSize) -> Result<DiscreteForm> {
    let grid = Grid::new(tc, size)?;
    let circle = tc.circle();
    let rt = circle.r() * circle.tau();
    let problem = RectProblem {
        ns: grid.ns,
        nt: grid.nt,
        hs: grid.hs,
        ht: grid.ht,
        s_bc: SideBc::Periodic,
        t_bc: match tc.bc() {
            BoundaryCondition::Dirichlet => SideBc::Dirichlet,
            BoundaryCondition::Neumann => SideBc::Neumann,
        },
        g11: 1.0,
        g12: rt,
        g22: circle.fiber_stiffness(),
        potential: circle.potential(),
    };
    Ok(DiscreteForm::from_rect(&problem))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// M-normalised grid functions, in the layout of
    /// [`DiscreteForm::grid_function`].
    pub eigenvectors: Vec<Vec<f64>>,
    /// Eigenvalues below −tol_zero among those computed.
    pub morse_index: usize,
    /// Present when the mean-zero problem was solved as well.
    pub weak_index: Option<usize>,
    pub worst_residual: f64,
}

fn pairs_to_spectrum(df: &DiscreteForm, pairs: eigen::EigenPairs) -> NumericSpectrum {
    let tol = df.zero_tolerance();
    NumericSpectrum {
        morse_index: pairs.values.iter().filter(|&&l| l < -tol).count(),
        eigenvalues: pairs.values,
        eigenvectors: pairs.vectors,
        weak_index: None,
        worst_residual: pairs.worst_residual,
    }
}

/// The `k` algebraically smallest eigenpairs of K v = λ M v.
pub fn solve_smallest(df: &DiscreteForm, k: usize) -> Result<NumericSpectrum> {
    Ok(pairs_to_spectrum(df, df.problem(false).smallest(k)?))
}

/// The `k` smallest eigenpairs among mean-zero grid functions.
pub fn solve_smallest_mean_zero(df: &DiscreteForm, k: usize) -> Result<NumericSpectrum> {
    Ok(pairs_to_spectrum(df, df.problem(true).smallest(k)?))
}

/// Number of eigenvalues below −tol_zero, found by doubling the number of
/// computed pairs until the largest one is non-negative.
pub fn count_negative(df: &DiscreteForm, mean_zero: bool, initial: usize) -> Result<usize> {
    let problem = df.problem(mean_zero);
    let tol = df.zero_tolerance();
    // a dense solve yields the whole spectrum at the same cost
    let start = if problem.capacity() <= DENSE_LIMIT { problem.capacity() } else { initial.max(1) };
    let mut k = start.min(problem.capacity());
    loop {
        let pairs = problem.smallest(k)?;
        let negative = pairs.values.iter().filter(|&&l| l < -tol).count();
        if negative < k || k == problem.capacity() {
            return Ok(negative);
        }
        k = (2 * k).min(problem.capacity());
    }
}

/// Morse index of the discrete form.
pub fn morse_index(df: &DiscreteForm) -> Result<usize> {
    count_negative(df, false, 8)
}

/// Weak index: negative directions of K restricted to 1ᵀMv = 0. `k` is the
/// initial number of pairs computed.
pub fn weak_index(df: &DiscreteForm, k: usize) -> Result<usize> {
    count_negative(df, true, k)
}

/// uᵀKu, the discrete value of Q[u].
pub fn quadratic_form(df: &DiscreteForm, u: &[f64]) -> Result<f64> {
    df.check_len(u)?;
    Ok(df.stiffness.quadratic(u))
}

/// The `count` lowest eigenpairs whose eigenvectors do not vary along s,
/// ascending. These are the discrete counterparts of the closed-form modes.
pub fn axisymmetric_modes(df: &DiscreteForm, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let problem = df.problem(false);
    let mut k = (count + 4).min(problem.capacity());
    loop {
        let pairs = problem.smallest(k)?;
        let found: Vec<(f64, Vec<f64>)> = pairs
            .values
            .into_iter()
            .zip(pairs.vectors)
            .filter(|(_, v)| df.s_variation(v) < 1e-6)
            .take(count)
            .collect();
        if found.len() == count || k == problem.capacity() {
            return Ok(found);
        }
        k = (2 * k).min(problem.capacity());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub certified: bool,
    #[serde(skip)]
    pub witness: Vec<f64>,
    pub q_value: f64,
    pub mean: f64,
}

/// Evaluates Q on sin(2πt/L) (Dirichlet) or cos(2πt/L) (Neumann). Both have
/// zero mean and satisfy the boundary condition, so Q < 0 proves
/// instability.
pub fn instability_certificate(tc: &TruncatedCylinder) -> Result<Certificate> {
    instability_certificate_on(tc, GridSize::default())
}

pub fn instability_certificate_on(tc: &TruncatedCylinder, size: GridSize) -> Result<Certificate> {
    let df = assemble(tc, size)?;
    let w = 2.0 * std::f64::consts::PI / tc.length();
    let witness = match tc.bc() {
        BoundaryCondition::Dirichlet => df.grid_function(|_, t| (w * t).sin()),
        BoundaryCondition::Neumann => df.grid_function(|_, t| (w * t).cos()),
    };
    let q_value = quadratic_form(&df, &witness)?;
    let mean = df.mean(&witness)?;
    Ok(Certificate { certified: q_value < 0.0 && mean.abs() < 1e-10, witness, q_value, mean })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCheck {
    pub n: i64,
    pub analytic: f64,
    pub numeric: f64,
    pub numeric_fine: f64,
    pub rel_err: f64,
    pub rel_err_fine: f64,
    /// log₂ of the error ratio under grid doubling; absent when both errors
    /// are at round-off level.
    pub order: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub grid: GridSize,
    pub fine_grid: GridSize,
    pub tolerance: f64,
    pub order_range: (f64, f64),
    pub modes: Vec<ModeCheck>,
    pub pass: bool,
}

pub const DEFAULT_VERIFY_TOL: f64 = 0.02;
pub const ORDER_RANGE: (f64, f64) = (1.5, 2.5);
const ROUNDOFF_LEVEL: f64 = 1e-10;

/// Compares the axially symmetric numeric modes at `size` and at the doubled
/// grid with the closed-form λ_n, n ≤ n_max.
pub fn verify(tc: &TruncatedCylinder, size: GridSize, n_max: i64, tolerance: f64) -> Result<VerifyReport> {
    let first = tc.bc().first_mode();
    if n_max < first {
        return Err(Error::InvalidMode { n: n_max, bc: tc.bc().name() });
    }
    let wanted = (n_max - first + 1) as usize;
    let fine_size = size.doubled();
    let coarse = axisymmetric_modes(&assemble(tc, size)?, wanted)?;
    let fine = axisymmetric_modes(&assemble(tc, fine_size)?, wanted)?;
    let c = tc.circle().potential();
    let mut modes = Vec::with_capacity(wanted);
    for (i, n) in (first..=n_max).enumerate() {
        let analytic = eigenvalue_n(tc, n)?;
        let scale = if analytic.abs() > 1e-8 * c { analytic.abs() } else { c };
        let (numeric, numeric_fine) = match (coarse.get(i), fine.get(i)) {
            (Some(a), Some(b)) => (a.0, b.0),
            // the grid cannot resolve this many axially symmetric modes
            _ => (f64::NAN, f64::NAN),
        };
        let rel_err = (numeric - analytic).abs() / scale;
        let rel_err_fine = (numeric_fine - analytic).abs() / scale;
        let order = (rel_err > ROUNDOFF_LEVEL || rel_err_fine > ROUNDOFF_LEVEL).then(|| (rel_err / rel_err_fine).log2());
        let order_ok = order.is_none_or(|p| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&p));
        let pass = rel_err <= tolerance && order_ok;
        modes.push(ModeCheck { n, analytic, numeric, numeric_fine, rel_err, rel_err_fine, order, pass });
    }
    let pass = modes.iter().all(|m| m.pass);
    Ok(VerifyReport { grid: size, fine_grid: fine_size, tolerance, order_range: ORDER_RANGE, modes, pass })
}

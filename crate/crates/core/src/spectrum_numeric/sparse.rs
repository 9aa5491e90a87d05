//! Symmetric sparse matrices and assembly of the discrete quadratic form on a
//! coordinate rectangle.

use std::collections::BTreeMap;

/// Symmetric matrix in CSR form with both triangles stored. Off-diagonal
/// pairs are written from a single accumulated value, so `a[i][j] == a[j][i]`
/// holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymCsr {
    /// Builds from upper-triangle entries (i ≤ j); repeated keys are summed
    /// in insertion order.
    pub(crate) fn from_upper(n: usize, upper: &BTreeMap<(usize, usize), f64>) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &v) in upper {
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quadratic(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>()).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// max |a_ij − a_ji| over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Boundary treatment along one side pair of the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideBc {
    Periodic,
    Dirichlet,
    Neumann,
}

impl SideBc {
    /// Node indices (out of `intervals + 1` grid lines) that carry unknowns.
    fn free_nodes(self, intervals: usize) -> std::ops::Range<usize> {
        match self {
            SideBc::Periodic => 0..intervals,
            SideBc::Dirichlet => 1..intervals,
            SideBc::Neumann => 0..intervals + 1,
        }
    }
}

/// ∫ g¹¹u_s² + 2g¹²u_s u_t + g²²u_t² − c u² over [0, Ns·hs] × [0, Nt·ht].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RectProblem {
    pub ns: usize,
    pub nt: usize,
    pub hs: f64,
    pub ht: f64,
    pub s_bc: SideBc,
    pub t_bc: SideBc,
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub potential: f64,
}

/// Assembled form together with the layout of the unknowns: dof index is
/// `jt * s_nodes.len() + is`.
#[derive(Debug, Clone)]
pub(crate) struct Assembled {
    pub stiffness: SymCsr,
    pub mass: Vec<f64>,
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
}

impl RectProblem {
    pub fn assemble(&self) -> Assembled {
        let s_free = self.s_bc.free_nodes(self.ns);
        let t_free = self.t_bc.free_nodes(self.nt);
        let n_s = s_free.len();
        let n = n_s * t_free.len();
        let dof = |i: usize, j: usize| -> Option<usize> {
            let i = if self.s_bc == SideBc::Periodic { i % self.ns } else { i };
            (s_free.contains(&i) && t_free.contains(&j)).then(|| (j - t_free.start) * n_s + (i - s_free.start))
        };

        // local corner order: (i, j), (i+1, j), (i, j+1), (i+1, j+1)
        let e0 = [-1.0, 1.0, 0.0, 0.0];
        let e1 = [0.0, 0.0, -1.0, 1.0];
        let f0 = [-1.0, 0.0, 1.0, 0.0];
        let f1 = [0.0, -1.0, 0.0, 1.0];
        let ds = [-0.5, 0.5, -0.5, 0.5];
        let dt = [-0.5, -0.5, 0.5, 0.5];
        let ws = self.ht / self.hs * self.g11 * 0.5;
        let wt = self.hs / self.ht * self.g22 * 0.5;
        let wx = self.g12;
        let mut local = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                local[a][b] = ws * (e0[a] * e0[b] + e1[a] * e1[b])
                    + wt * (f0[a] * f0[b] + f1[a] * f1[b])
                    + wx * (ds[a] * dt[b] + dt[a] * ds[b]);
            }
        }
        let quarter = 0.25 * self.hs * self.ht;

        let mut upper: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut mass = vec![0.0; n];
        for cj in 0..self.nt {
            for ci in 0..self.ns {
                let corners = [dof(ci, cj), dof(ci + 1, cj), dof(ci, cj + 1), dof(ci + 1, cj + 1)];
                for a in 0..4 {
                    let Some(p) = corners[a] else { continue };
                    mass[p] += quarter;
                    for b in 0..4 {
                        let Some(q) = corners[b] else { continue };
                        if p <= q {
                            *upper.entry((p, q)).or_insert(0.0) += local[a][b];
                        }
                    }
                }
            }
        }
        for (p, m) in mass.iter().enumerate() {
            *upper.entry((p, p)).or_insert(0.0) -= self.potential * m;
        }

        let s_nodes = s_free.clone().map(|i| i as f64 * self.hs).collect();
        let t_nodes = t_free.clone().map(|j| j as f64 * self.ht).collect();
        Assembled { stiffness: SymCsr::from_upper(n, &upper), mass, s_nodes, t_nodes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(s_bc: SideBc, t_bc: SideBc, g12: f64, c: f64) -> RectProblem {
        RectProblem { ns: 8, nt: 9, hs: 0.3, ht: 0.7, s_bc, t_bc, g11: 1.0, g12, g22: 1.0 + g12 * g12, potential: c }
    }

    #[test]
    fn layout_sizes() {
        let a = problem(SideBc::Periodic, SideBc::Dirichlet, 0.0, 0.0).assemble();
        assert_eq!(a.mass.len(), 8 * 8);
        let a = problem(SideBc::Periodic, SideBc::Neumann, 0.0, 0.0).assemble();
        assert_eq!(a.mass.len(), 8 * 10);
        let a = problem(SideBc::Dirichlet, SideBc::Neumann, 0.0, 0.0).assemble();
        assert_eq!(a.mass.len(), 7 * 10);
    }

    #[test]
    fn constants_in_kernel_and_exact_symmetry() {
        let a = problem(SideBc::Periodic, SideBc::Neumann, 0.8, 0.0).assemble();
        let ones = vec![1.0; a.mass.len()];
        assert!(a.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
        assert_eq!(a.stiffness.asymmetry(), 0.0);
        let total: f64 = a.mass.iter().sum();
        assert!((total - 8.0 * 0.3 * 9.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn five_point_stencil_without_cross_term() {
        let p = RectProblem {
            ns: 8,
            nt: 8,
            hs: 1.0,
            ht: 1.0,
            s_bc: SideBc::Periodic,
            t_bc: SideBc::Dirichlet,
            g11: 1.0,
            g12: 0.0,
            g22: 1.0,
            potential: 0.0,
        };
        let a = p.assemble();
        let k = &a.stiffness;
        let centre = 3 * 8 + 4;
        assert_eq!(k.get(centre, centre), 4.0);
        assert_eq!(k.get(centre, centre + 1), -1.0);
        assert_eq!(k.get(centre, centre + 8), -1.0);
        assert_eq!(k.get(centre, centre + 9), 0.0);
        // periodic wrap
        assert_eq!(k.get(3 * 8, 3 * 8 + 7), -1.0);
    }
}

//! Smallest eigenpairs of K v = λ M v with M diagonal.
//!
//! Small problems go through a dense symmetric eigensolver on
//! M^{-1/2} K M^{-1/2}. Larger ones use block Lanczos with full
//! reorthogonalisation on the shift-inverted operator
//! T = M^{1/2}(K + αM)^{-1}M^{1/2}, restarted from the Ritz vectors until
//! every requested pair meets the residual tolerance.
//!
//! The optional constraint restricts the problem to vectors with
//! 1ᵀM v = 0 (mean zero).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::banded::BandCholesky;
use super::sparse::SymCsr;
use crate::error::{Error, Result};

/// Problems with at most this many unknowns are solved densely.
pub const DENSE_LIMIT: usize = 600;

pub const RESIDUAL_TOL: f64 = 1e-8;

const MAX_RESTARTS: usize = 80;
const START_SEED: u64 = 0x5eed_e16e;

#[derive(Debug, Clone)]
pub(crate) struct EigenPairs {
    pub values: Vec<f64>,
    /// M-normalised, largest-magnitude entry positive.
    pub vectors: Vec<Vec<f64>>,
    pub worst_residual: f64,
}

pub(crate) struct Problem<'a> {
    pub stiffness: &'a SymCsr,
    pub mass: &'a [f64],
    /// Ordering handed to the banded factorisation.
    pub band_order: &'a [usize],
    pub mean_zero: bool,
    /// Any lower bound for the spectrum; fixes the shift.
    pub lower_bound: f64,
}

impl Problem<'_> {
    fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Largest number of pairs that can be requested.
    pub fn capacity(&self) -> usize {
        self.dim() - usize::from(self.mean_zero)
    }

    /// ‖Kv − λMv − βM1‖ / ‖v‖, with β the Lagrange multiplier of the
    /// constraint (zero when unconstrained).
    fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let kv = self.stiffness.mul_vec(v);
        let beta = if self.mean_zero {
            kv.iter().sum::<f64>() / self.mass.iter().sum::<f64>()
        } else {
            0.0
        };
        let r: f64 = kv
            .iter()
            .zip(v)
            .zip(self.mass)
            .map(|((k, x), m)| {
                let d = k - lambda * m * x - beta * m;
                d * d
            })
            .sum();
        let norm: f64 = v.iter().map(|x| x * x).sum();
        (r / norm).sqrt()
    }

    /// Unit vector e = M^{1/2}·1 / ‖M^{1/2}·1‖.
    fn constraint_direction(&self) -> DVector<f64> {
        let e = DVector::from_iterator(self.dim(), self.mass.iter().map(|m| m.sqrt()));
        let norm = e.norm();
        e / norm
    }

    pub fn smallest(&self, count: usize) -> Result<EigenPairs> {
        if count == 0 || count > self.capacity() {
            return Err(Error::InvalidInput(format!(
                "requested {count} eigenpairs from a problem with {} admissible directions",
                self.capacity()
            )));
        }
        let (values, scaled) = if self.dim() <= DENSE_LIMIT {
            self.dense(count)
        } else {
            self.lanczos(count)?
        };
        self.finish(values, scaled)
    }

    /// Maps y = M^{1/2}v back to v, normalises and checks residuals.
    fn finish(&self, values: Vec<f64>, scaled: Vec<DVector<f64>>) -> Result<EigenPairs> {
        let mut worst = 0.0f64;
        let mut vectors = Vec::with_capacity(scaled.len());
        for (lambda, y) in values.iter().zip(&scaled) {
            let norm = y.norm();
            let mut v: Vec<f64> = y.iter().zip(self.mass).map(|(yi, m)| yi / norm / m.sqrt()).collect();
            let pivot = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            worst = worst.max(self.residual(*lambda, &v));
            vectors.push(v);
        }
        if worst >= RESIDUAL_TOL {
            return Err(Error::ConvergenceFailure { detail: "eigenpair residual above tolerance".into(), residual: worst });
        }
        Ok(EigenPairs { values, vectors, worst_residual: worst })
    }

    fn dense(&self, count: usize) -> (Vec<f64>, Vec<DVector<f64>>) {
        let n = self.dim();
        let mut c = self.stiffness.to_dense();
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] /= (self.mass[i] * self.mass[j]).sqrt();
            }
        }
        // Householder reflector H with H·e = ±e₁; the constrained problem is
        // the trailing block of H C H
        let reflector = self.mean_zero.then(|| {
            let mut w = self.constraint_direction();
            w[0] += if w[0] >= 0.0 { 1.0 } else { -1.0 };
            let norm = w.norm();
            w / norm
        });
        let reduced = match &reflector {
            Some(w) => {
                let cw = &c * w;
                let wcw = w.dot(&cw);
                // H C H = C − 2w(Cw)ᵀ − 2(Cw)wᵀ + 4(wᵀCw)wwᵀ
                let hch = &c - 2.0 * w * cw.transpose() - 2.0 * &cw * w.transpose() + 4.0 * wcw * w * w.transpose();
                hch.view((1, 1), (n - 1, n - 1)).into_owned()
            }
            None => c,
        };
        let eig = SymmetricEigen::new(reduced);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut values = Vec::with_capacity(count);
        let mut vectors = Vec::with_capacity(count);
        for &i in order.iter().take(count) {
            values.push(eig.eigenvalues[i]);
            let col = eig.eigenvectors.column(i).into_owned();
            let y = match &reflector {
                Some(w) => {
                    let mut full = DVector::zeros(n);
                    full.rows_mut(1, n - 1).copy_from(&col);
                    let d = w.dot(&full);
                    full - 2.0 * d * w
                }
                None => col,
            };
            vectors.push(y);
        }
        (values, vectors)
    }

    fn lanczos(&self, count: usize) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
        let n = self.dim();
        let capacity = self.capacity();
        // K + αM is positive definite once α exceeds −λ_min
        let alpha = (-self.lower_bound).max(0.0) + 1.0;
        let shift: Vec<f64> = self.mass.iter().map(|m| alpha * m).collect();
        let chol = BandCholesky::factor(self.stiffness, &shift, self.band_order.to_vec())?;
        let sqrt_m: Vec<f64> = self.mass.iter().map(|m| m.sqrt()).collect();
        let apply_t = |y: &DVector<f64>| -> DVector<f64> {
            let b: Vec<f64> = y.iter().zip(&sqrt_m).map(|(a, s)| a * s).collect();
            let x = chol.solve(&b);
            DVector::from_iterator(n, x.iter().zip(&sqrt_m).map(|(a, s)| a * s))
        };
        let e = self.constraint_direction();
        let z = self.mean_zero.then(|| apply_t(&e));
        let ez = z.as_ref().map(|z| e.dot(z));
        let apply = |y: &DVector<f64>| -> DVector<f64> {
            let ty = apply_t(y);
            match (&z, ez) {
                (Some(z), Some(ez)) => {
                    let mut out = ty - z * (z.dot(y) / ez);
                    // keep round-off from leaking back along e
                    let drift = e.dot(&out);
                    out -= &e * drift;
                    out
                }
                _ => ty,
            }
        };

        let block = (count + count / 2).max(count + 4).min(capacity);
        let basis_target = (3 * block).max(40).min(capacity);
        let depth = basis_target.div_ceil(block).max(2);

        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
        let mut start = DMatrix::from_fn(n, block, |_, _| rng.random::<f64>() - 0.5);
        let mut worst = f64::INFINITY;
        for _ in 0..MAX_RESTARTS {
            let mut basis: Vec<DVector<f64>> = Vec::new();
            let mut images: Vec<DVector<f64>> = Vec::new();
            let mut current = self.orthonormalise(&start, &basis, &e);
            for level in 0..depth {
                if current.is_empty() || basis.len() >= capacity {
                    break;
                }
                let room = capacity - basis.len();
                current.truncate(room);
                let imgs: Vec<DVector<f64>> = current.iter().map(&apply).collect();
                basis.extend(current.iter().cloned());
                images.extend(imgs.iter().cloned());
                if level + 1 < depth {
                    let next = DMatrix::from_columns(&imgs);
                    current = self.orthonormalise(&next, &basis, &e);
                }
            }
            let m = basis.len();
            let v = DMatrix::from_columns(&basis);
            let w = DMatrix::from_columns(&images);
            let h = v.transpose() * &w;
            let h = (&h + h.transpose()) * 0.5;
            let eig = SymmetricEigen::new(h);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let keep = block.min(m);
            let ritz: Vec<DVector<f64>> = order[..keep].iter().map(|&i| &v * eig.eigenvectors.column(i)).collect();
            let values: Vec<f64> = order[..keep].iter().map(|&i| 1.0 / eig.eigenvalues[i] - alpha).collect();

            worst = 0.0;
            for (lambda, y) in values.iter().zip(&ritz).take(count) {
                let vec: Vec<f64> = y.iter().zip(&sqrt_m).map(|(a, s)| a / s).collect();
                worst = worst.max(self.residual(*lambda, &vec));
            }
            if worst < 0.1 * RESIDUAL_TOL || m >= capacity {
                return Ok((values[..count].to_vec(), ritz[..count].to_vec()));
            }
            start = DMatrix::from_columns(&ritz);
        }
        Err(Error::ConvergenceFailure { detail: format!("block Lanczos stalled after {MAX_RESTARTS} restarts"), residual: worst })
    }

    /// Orthonormalises the columns of `block` against `basis` (and against
    /// the constraint direction when constrained), dropping columns that
    /// become numerically dependent.
    fn orthonormalise(&self, block: &DMatrix<f64>, basis: &[DVector<f64>], e: &DVector<f64>) -> Vec<DVector<f64>> {
        let mut out: Vec<DVector<f64>> = Vec::new();
        for col in block.column_iter() {
            let mut x = col.into_owned();
            let original = x.norm();
            if original == 0.0 {
                continue;
            }
            for _ in 0..2 {
                if self.mean_zero {
                    let d = e.dot(&x);
                    x -= e * d;
                }
                for b in basis.iter().chain(out.iter()) {
                    let d = b.dot(&x);
                    x -= b * d;
                }
            }
            let norm = x.norm();
            if norm > 1e-10 * original {
                out.push(x / norm);
            }
        }
        out
    }
}

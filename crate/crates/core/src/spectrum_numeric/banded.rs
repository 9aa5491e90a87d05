//! Banded Cholesky factorisation for the shift-invert solves.

use super::sparse::SymCsr;
use crate::error::{Error, Result};

/// L·Lᵀ factor of a symmetric positive definite matrix stored in band form
/// under a fixed reordering of the unknowns.
#[derive(Debug, Clone)]
pub(crate) struct BandCholesky {
    n: usize,
    band: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// Row `i` holds L[i][i − band ..= i] at offsets 0 ..= band.
    rows: Vec<f64>,
}

impl BandCholesky {
    /// Factors A + diag(shift) where A is `matrix` (SPD after the shift).
    pub fn factor(matrix: &SymCsr, diag_shift: &[f64], perm: Vec<usize>) -> Result<Self> {
        let n = matrix.dim();
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut band = 0;
        for old in 0..n {
            for (j, _) in matrix.row(old) {
                band = band.max(inverse[old].abs_diff(inverse[j]));
            }
        }
        let width = band + 1;
        let mut rows = vec![0.0; n * width];
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in matrix.row(old) {
                let col = inverse[j];
                if col <= new {
                    rows[new * width + band - (new - col)] += v;
                }
            }
            rows[new * width + band] += diag_shift[old];
        }

        for i in 0..n {
            let first = i.saturating_sub(band);
            for j in first..=i {
                let mut sum = rows[i * width + band - (i - j)];
                let start = first.max(j.saturating_sub(band));
                for k in start..j {
                    sum -= rows[i * width + band - (i - k)] * rows[j * width + band - (j - k)];
                }
                if j == i {
                    if !(sum > 0.0) {
                        return Err(Error::ConvergenceFailure {
                            detail: format!("shifted matrix is not positive definite at pivot {i}"),
                            residual: sum,
                        });
                    }
                    rows[i * width + band] = sum.sqrt();
                } else {
                    rows[i * width + band - (i - j)] = sum / rows[j * width + band];
                }
            }
        }
        Ok(Self { n, band, perm, rows })
    }

    #[cfg(test)]
    pub fn bandwidth(&self) -> usize {
        self.band
    }

    /// Solves (A + shift)·x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, band, width) = (self.n, self.band, self.band + 1);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let first = i.saturating_sub(band);
            let mut sum = y[i];
            for k in first..i {
                sum -= self.rows[i * width + band - (i - k)] * y[k];
            }
            y[i] = sum / self.rows[i * width + band];
        }
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n.min(i + band + 1) {
                sum -= self.rows[k * width + band - (k - i)] * y[k];
            }
            y[i] = sum / self.rows[i * width + band];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Ordering of a periodic ring 0, N−1, 1, N−2, …: ring neighbours, including
/// the wrap-around pair, end up at most two positions apart.
pub(crate) fn folded_ring(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        order.push(lo);
        lo += 1;
        if lo < hi {
            hi -= 1;
            order.push(hi);
        }
    }
    order
}

//! Dense real Schur factorisation and eigenvalue extraction.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `A = Q T Qᵀ` with `Q` orthogonal and `T` upper quasi-triangular
/// (1×1 and 2×2 diagonal blocks).
#[derive(Debug, Clone)]
pub struct RealSchur {
    pub q: DMatrix<f64>,
    pub t: DMatrix<f64>,
}

impl RealSchur {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "Schur factorisation needs a square matrix");
        if n == 0 {
            return Ok(Self { q: DMatrix::zeros(0, 0), t: DMatrix::zeros(0, 0) });
        }
        let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 0)
            .ok_or(Error::EigenNonConvergence(n))?;
        let (q, mut t) = schur.unpack();
        // Flush the strictly-lower part so the block structure is exact.
        let blocks = diagonal_blocks(&t);
        let scale = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut flushed = 0.0f64;
        for j in 0..n {
            for i in (j + 1)..n {
                let inside_block = blocks.iter().any(|&(s, len)| len == 2 && j == s && i == s + 1);
                if !inside_block {
                    flushed = flushed.max(t[(i, j)].abs());
                    t[(i, j)] = 0.0;
                }
            }
        }
        if flushed > 1e-10 * scale {
            return Err(Error::EigenNonConvergence(n));
        }
        Ok(Self { q, t })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal blocks of `T` as `(start, size)` pairs.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        diagonal_blocks(&self.t)
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.dim());
        for (s, len) in self.blocks() {
            if len == 1 {
                out.push(Complex64::new(self.t[(s, s)], 0.0));
            } else {
                let (l1, l2) = eig2x2(
                    self.t[(s, s)],
                    self.t[(s, s + 1)],
                    self.t[(s + 1, s)],
                    self.t[(s + 1, s + 1)],
                );
                out.push(l1);
                out.push(l2);
            }
        }
        out
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Partition a quasi-triangular matrix into its 1×1 and 2×2 diagonal blocks.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let scale = t.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let negligible = |v: f64| v.abs() <= 1e-14 * scale;
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && !negligible(t[(i + 1, i)]) {
            out.push((i, 2));
            i += 2;
        } else {
            out.push((i, 1));
            i += 1;
        }
    }
    out
}

/// Eigenvalues of `[[a, b], [c, d]]`.
pub fn eig2x2(a: f64, b: f64, c: f64, d: f64) -> (Complex64, Complex64) {
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller-magnitude root.
        let big = if mean >= 0.0 { mean + s } else { mean - s };
        let det = a * d - b * c;
        let small = if big != 0.0 { det / big } else { mean - s };
        (Complex64::new(big, 0.0), Complex64::new(small, 0.0))
    } else {
        let s = (-disc).sqrt();
        (Complex64::new(mean, s), Complex64::new(mean, -s))
    }
}

/// Solve `M x = rhs` for small dense `M` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_small<const N: usize>(mut m: [[f64; N]; N], mut rhs: [f64; N]) -> Result<[f64; N]> {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return Err(Error::Singular);
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..N {
            let factor = m[row][col] / m[col][col];
            if factor != 0.0 {
                for k in col..N {
                    m[row][k] -= factor * m[col][k];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..N {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schur_reconstructs() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                -0.1, -2.0, 0.3, 0.0, //
                2.0, -0.1, 0.0, 0.5, //
                0.0, 0.0, -0.002, 0.1, //
                0.4, 0.2, -0.1, -0.002,
            ],
        );
        let s = RealSchur::new(&a).unwrap();
        let back = &s.q * &s.t * s.q.transpose();
        assert!((back - &a).norm() < 1e-12);
        let qtq = s.q.transpose() * &s.q;
        assert!((qtq - DMatrix::identity(4, 4)).norm() < 1e-12);
        let trace: f64 = s.eigenvalues().iter().map(|z| z.re).sum();
        assert!((trace - a.trace()).abs() < 1e-12);
    }

    #[test]
    fn abscissa_of_scaled_identity() {
        let a = DMatrix::<f64>::identity(6, 6) * -0.3;
        let s = RealSchur::new(&a).unwrap();
        assert!((s.spectral_abscissa() + 0.3).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_eigenvalues() {
        let (l1, l2) = eig2x2(-0.1, -2.0, 2.0, -0.1);
        assert!((l1 - Complex64::new(-0.1, 2.0)).norm() < 1e-15);
        assert!((l2 - Complex64::new(-0.1, -2.0)).norm() < 1e-15);
        let (l1, l2) = eig2x2(3.0, 1.0, 0.0, 2.0);
        assert!((l1.re - 3.0).abs() < 1e-15 && (l2.re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_solver() {
        let x = solve_small([[0.0, 2.0], [3.0, 1.0]], [4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve_small([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]).is_err());
    }
}

//! Eigenvalues of dense real nonsymmetric matrices.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then the
//! Francis implicit double-shift QR iteration restricted to the active
//! window (eigenvalues only, no Schur vectors). Used wherever only the
//! spectrum is needed, e.g. stability maps.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITERS_PER_EIGENVALUE: usize = 60;

/// Row-major square matrix with 1-based indexing, matching the textbook
/// statement of the QR sweep.
struct Work {
    n: usize,
    data: Vec<f64>,
}

impl Work {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                data[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.n + 1) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * (self.n + 1) + j]
    }
}

fn balance(a: &mut Work) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a.at(j, i).abs();
                    r += a.at(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        *a.at_mut(i, j) *= g;
                    }
                    for j in 1..=n {
                        *a.at_mut(j, i) *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg(a: &mut Work) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n + 1];
    for k in 1..=(n - 2) {
        let alpha2: f64 = ((k + 1)..=n).map(|i| a.at(i, k).powi(2)).sum();
        if alpha2 == 0.0 {
            continue;
        }
        let x0 = a.at(k + 1, k);
        let alpha = -x0.signum() * alpha2.sqrt();
        let alpha = if x0 == 0.0 { -alpha2.sqrt() } else { alpha };
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..=n {
            v[i] = a.at(i, k);
        }
        let vnorm2: f64 = ((k + 1)..=n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // Left: rows k+1..n, columns k..n.
        for j in k..=n {
            let dot: f64 = ((k + 1)..=n).map(|i| v[i] * a.at(i, j)).sum();
            let s = beta * dot;
            for i in (k + 1)..=n {
                *a.at_mut(i, j) -= s * v[i];
            }
        }
        // Right: all rows, columns k+1..n.
        for i in 1..=n {
            let dot: f64 = ((k + 1)..=n).map(|j| a.at(i, j) * v[j]).sum();
            let s = beta * dot;
            for j in (k + 1)..=n {
                *a.at_mut(i, j) -= s * v[j];
            }
        }
        for i in (k + 2)..=n {
            *a.at_mut(i, k) = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroys `a`).
fn hessenberg_qr(a: &mut Work) -> Result<Vec<Complex64>> {
    let n = a.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a.at(i, j).abs();
        }
    }
    let mut nn = n as isize;
    let mut t = 0.0;
    // Carried across iterations of the double-shift sweep, as in hqr.
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w): (f64, f64, f64, f64);
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 2 {
                let mut s = a.at(l - 1, l - 1).abs() + a.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.at(l, l - 1).abs() <= f64::EPSILON * s {
                    *a.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a.at(nu, nu);
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                y = a.at(nu - 1, nu - 1);
                w = a.at(nu, nu - 1) * a.at(nu - 1, nu);
                if l == nu - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its >= MAX_ITERS_PER_EIGENVALUE {
                        return Err(Error::EigenNonConvergence(n));
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 1..=nu {
                            *a.at_mut(i, i) -= x;
                        }
                        let s = a.at(nu, nu - 1).abs() + a.at(nu - 1, nu - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nu - 2;
                    loop {
                        z = a.at(m, m);
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a.at(m + 1, m) + a.at(m, m + 1);
                        q = a.at(m + 1, m + 1) - z - r - s;
                        r = a.at(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a.at(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a.at(m - 1, m - 1).abs() + z.abs() + a.at(m + 1, m + 1).abs());
                        if u <= f64::EPSILON * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nu {
                        *a.at_mut(i, i - 2) = 0.0;
                        if i != m + 2 {
                            *a.at_mut(i, i - 3) = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a.at(k, k - 1);
                            q = a.at(k + 1, k - 1);
                            r = 0.0;
                            if k != nu - 1 {
                                r = a.at(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    *a.at_mut(k, k - 1) = -a.at(k, k - 1);
                                }
                            } else {
                                *a.at_mut(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a.at(k, j) + q * a.at(k + 1, j);
                                if k != nu - 1 {
                                    p += r * a.at(k + 2, j);
                                    *a.at_mut(k + 2, j) -= p * z;
                                }
                                *a.at_mut(k + 1, j) -= p * y;
                                *a.at_mut(k, j) -= p * x;
                            }
                            let mmin = nu.min(k + 3);
                            for i in l..=mmin {
                                p = x * a.at(i, k) + y * a.at(i, k + 1);
                                if k != nu - 1 {
                                    p += z * a.at(i, k + 2);
                                    *a.at_mut(i, k + 2) -= p * r;
                                }
                                *a.at_mut(i, k + 1) -= p * q;
                                *a.at_mut(i, k) -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of a square real matrix, in no particular order.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    assert_eq!(m.nrows(), m.ncols(), "eigenvalues of a non-square matrix");
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut a = Work::from_matrix(m);
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

/// Maximum real part over the spectrum.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

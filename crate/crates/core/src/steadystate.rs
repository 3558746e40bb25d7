//! Steady-state covariance matrix `V` solving `A V + V Aᵀ = −D`.
//!
//! The production route is Bartels–Stewart on the real Schur form of `A`.
//! Two independent routes are kept alongside it: a Kronecker-vectorised
//! dense solve for small systems, and exact propagation of the covariance
//! ODE `dV/dt = AV + VAᵀ + D` with the matrix-exponential propagator.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::eigen;
use crate::error::{Error, Result};
use crate::linalg::{solve_small, RealSchur};
use crate::network::{DiffusionMatrix, DriftMatrix, StabilityReport};

/// Maximum relative Lyapunov residual accepted from the production solver.
pub const LYAPUNOV_TOL: f64 = 1e-8;
/// Maximum relative residual accepted from the vectorised solver.
pub const VECTORIZED_TOL: f64 = 1e-10;
/// Largest dimension the vectorised solver accepts.
pub const VECTORIZED_MAX_DIM: usize = 24;
/// Vacuum variance of a single quadrature.
pub const VACUUM: f64 = 0.5;
/// Slack below the vacuum bound tolerated by the physicality check.
pub const PHYSICALITY_SLACK: f64 = 1e-9;

/// Steady-state covariance matrix in `[X_j, Y_j, x_j, y_j]` site ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub n_sites: usize,
    pub matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(n_sites: usize, matrix: DMatrix<f64>) -> Self {
        assert_eq!(matrix.nrows(), 4 * n_sites);
        assert_eq!(matrix.ncols(), 4 * n_sites);
        Self { n_sites, matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Symplectic form `⊕ [[0, 1], [−1, 0]]` over `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for m in 0..modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// `‖AV + VAᵀ + D‖_F / ‖D‖_F`.
pub fn lyapunov_residual(a: &DMatrix<f64>, v: &DMatrix<f64>, d: &DiffusionMatrix) -> f64 {
    let mut r = a * v + v * a.transpose();
    for (i, di) in d.diagonal.iter().enumerate() {
        r[(i, i)] += di;
    }
    let dn = d.diagonal.iter().map(|x| x * x).sum::<f64>().sqrt();
    r.norm() / dn.max(f64::MIN_POSITIVE)
}

fn symmetrize(mut v: DMatrix<f64>) -> DMatrix<f64> {
    let n = v.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (v[(i, j)] + v[(j, i)]);
            v[(i, j)] = m;
            v[(j, i)] = m;
        }
    }
    v
}

fn check_dims(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<()> {
    if a.dim() != d.dim() || a.dim() != 4 * a.n_sites {
        return Err(Error::InvalidParameter(format!(
            "drift is {}x{} for {} sites but diffusion has dimension {}",
            a.dim(),
            a.dim(),
            a.n_sites,
            d.dim()
        )));
    }
    Ok(())
}

/// Solve `T W + W Tᵀ = −F` for symmetric `W`, `T` upper quasi-triangular.
fn quasi_triangular_lyapunov(schur: &RealSchur, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let t = &schur.t;
    let n = t.nrows();
    let blocks = schur.blocks();
    let mut w = DMatrix::<f64>::zeros(n, n);

    for (jb, &(sj, qj)) in blocks.iter().enumerate().rev() {
        let ej = sj + qj;
        // Lower blocks of this column are known by symmetry.
        for &(si, pi) in &blocks[jb + 1..] {
            for r in 0..pi {
                for c in 0..qj {
                    w[(si + r, sj + c)] = w[(sj + c, si + r)];
                }
            }
        }
        // R = −F[:, cj] − Σ_{k>j} W[:, k] T[cj, k]ᵀ over rows 0..ej.
        let mut rhs = -f.view((0, sj), (ej, qj));
        if ej < n {
            rhs -= w.view((0, ej), (ej, n - ej)) * t.view((sj, ej), (qj, n - ej)).transpose();
        }
        for &(si, pi) in blocks[..=jb].iter().rev() {
            let ei = si + pi;
            let mut local = rhs.view((si, 0), (pi, qj)).into_owned();
            if ei < n {
                local -= t.view((si, ei), (pi, n - ei)) * w.view((ei, sj), (n - ei, qj));
            }
            let x = small_sylvester(t, (si, pi), (sj, qj), &local)?;
            for r in 0..pi {
                for c in 0..qj {
                    w[(si + r, sj + c)] = x[r + pi * c];
                }
            }
        }
    }
    Ok(w)
}

/// Solve `T_ii X + X T_jjᵀ = R` for a `p × q` block with `p, q ∈ {1, 2}`.
fn small_sylvester(
    t: &DMatrix<f64>,
    (si, p): (usize, usize),
    (sj, q): (usize, usize),
    rhs: &DMatrix<f64>,
) -> Result<[f64; 4]> {
    let mut m = [[0.0; 4]; 4];
    let mut b = [0.0; 4];
    for k in (p * q)..4 {
        m[k][k] = 1.0;
    }
    for c in 0..q {
        for r in 0..p {
            let row = r + p * c;
            b[row] = rhs[(r, c)];
            for r2 in 0..p {
                m[row][r2 + p * c] += t[(si + r, si + r2)];
            }
            for c2 in 0..q {
                m[row][r + p * c2] += t[(sj + c, sj + c2)];
            }
        }
    }
    solve_small(m, b)
}

/// Bartels–Stewart solve reusing a precomputed Schur factorisation of `A`.
pub fn solve_lyapunov_with_schur(
    a: &DriftMatrix,
    schur: &RealSchur,
    d: &DiffusionMatrix,
) -> Result<CovarianceMatrix> {
    check_dims(a, d)?;
    let report = StabilityReport::from_abscissa(schur.spectral_abscissa(), a.matrix.norm());
    if !report.stable {
        return Err(Error::NoSteadyState {
            abscissa: report.spectral_abscissa,
            tolerance: report.tolerance,
        });
    }
    let q = &schur.q;
    // F = Qᵀ D Q with D diagonal.
    let mut dq = q.clone();
    for (i, di) in d.diagonal.iter().enumerate() {
        dq.row_mut(i).scale_mut(*di);
    }
    let f = symmetrize(q.transpose() * dq);
    let w = quasi_triangular_lyapunov(schur, &f)?;
    let v = symmetrize(q * w * q.transpose());
    let residual = lyapunov_residual(&a.matrix, &v, d);
    if !(residual <= LYAPUNOV_TOL) {
        return Err(Error::SolverFailure { residual, tolerance: LYAPUNOV_TOL });
    }
    Ok(CovarianceMatrix::new(a.n_sites, v))
}

pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    check_dims(a, d)?;
    let schur = RealSchur::new(&a.matrix)?;
    solve_lyapunov_with_schur(a, &schur, d)
}

/// Dense solve of `(I⊗A + A⊗I) vec V = −vec D`; only for `dim ≤ 24`.
pub fn solve_lyapunov_vectorized(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    check_dims(a, d)?;
    let n = a.dim();
    if n > VECTORIZED_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: n, limit: VECTORIZED_MAX_DIM });
    }
    let am = &a.matrix;
    let nn = n * n;
    let mut k = DMatrix::<f64>::zeros(nn, nn);
    // Column-major vec: index(i, j) = i + n j.
    for j in 0..n {
        for i in 0..n {
            let row = i + n * j;
            for l in 0..n {
                k[(row, l + n * j)] += am[(i, l)];
                k[(row, i + n * l)] += am[(j, l)];
            }
        }
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(nn);
    for (i, di) in d.diagonal.iter().enumerate() {
        rhs[i + n * i] = -di;
    }
    let sol = k.lu().solve(&rhs).ok_or(Error::Singular)?;
    let v = symmetrize(DMatrix::from_column_slice(n, n, sol.as_slice()));
    let residual = lyapunov_residual(am, &v, d);
    if !(residual <= VECTORIZED_TOL) {
        return Err(Error::SolverFailure { residual, tolerance: VECTORIZED_TOL });
    }
    Ok(CovarianceMatrix::new(a.n_sites, v))
}

/// Propagate `dV/dt = AV + VAᵀ + D` from the bath-equilibrium initial state
/// until `‖dV/dt‖_F ≤ tol·‖D‖_F`.
///
/// Each step applies the exact propagator `V ← M V Mᵀ + Q_h` with
/// `M = exp(hA)` and `Q_h = ∫₀ʰ e^{sA} D e^{sAᵀ} ds` (Van Loan block
/// exponential). After every step the propagator is composed with itself,
/// so the step length doubles: `t_k = step·(2^k − 1)`.
pub fn integrate_to_steady_state(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    step: f64,
    horizon: f64,
    tol: f64,
) -> Result<CovarianceMatrix> {
    check_dims(a, d)?;
    if !(step > 0.0 && step.is_finite()) || !(horizon > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "integration needs positive step, horizon and tol (got {step}, {horizon}, {tol})"
        )));
    }
    let n = a.dim();
    let am = &a.matrix;
    let dm = d.to_dense();

    let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-am * step));
    block.view_mut((0, n), (n, n)).copy_from(&(&dm * step));
    block.view_mut((n, n), (n, n)).copy_from(&(am.transpose() * step));
    let e = block.exp();
    let f22 = e.view((n, n), (n, n)).into_owned();
    let f12 = e.view((0, n), (n, n)).into_owned();
    let mut m = f22.transpose();
    let mut qh = symmetrize(&m * f12);

    // Each quadrature starts in equilibrium with its own bath.
    let mut v = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let rate = -am[(i, i)];
        v[(i, i)] = if rate > 0.0 { d.diagonal[i] / (2.0 * rate) } else { VACUUM };
    }

    let mut time = 0.0;
    let mut h = step;
    let mut residual = lyapunov_residual(am, &v, d);
    while time < horizon {
        v = symmetrize(&m * &v * m.transpose() + &qh);
        time += h;
        residual = lyapunov_residual(am, &v, d);
        if !residual.is_finite() {
            break;
        }
        if residual <= tol {
            return Ok(CovarianceMatrix::new(a.n_sites, v));
        }
        qh = symmetrize(&m * &qh * m.transpose() + &qh);
        m = &m * &m;
        h *= 2.0;
    }
    Err(Error::IntegrationTimeout { time, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    pub min_symplectic_eigenvalue: f64,
    pub pass: bool,
}

/// Symplectic eigenvalues of a covariance matrix, ascending, one per mode.
///
/// For positive-definite `V` they are the square roots of the eigenvalues of
/// `(V^½ Ω V^½)ᵀ (V^½ Ω V^½)`, which is symmetric; otherwise the moduli of
/// the eigenvalues of `ΩV` are used.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = v.nrows();
    assert!(n % 2 == 0, "covariance dimension must be even");
    let omega = symplectic_form(n / 2);
    let eig = SymmetricEigen::new(v.clone());
    let mut values: Vec<f64> = if eig.eigenvalues.iter().all(|&l| l > 0.0) {
        let sqrt_diag = eig.eigenvalues.map(|l| l.sqrt());
        let mut scaled = eig.eigenvectors.clone();
        for (c, s) in sqrt_diag.iter().enumerate() {
            scaled.column_mut(c).scale_mut(*s);
        }
        let root = &scaled * eig.eigenvectors.transpose();
        let k = &root * &omega * &root;
        let gram = symmetrize(k.transpose() * &k);
        SymmetricEigen::new(gram).eigenvalues.iter().map(|&x| x.max(0.0).sqrt()).collect()
    } else {
        eigen::eigenvalues(&(&omega * v))?.iter().map(|z| z.norm()).collect()
    };
    values.sort_by(|a, b| a.total_cmp(b));
    // Each symplectic eigenvalue appears twice.
    Ok(values.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

pub fn physicality_check(v: &CovarianceMatrix) -> Result<PhysicalityReport> {
    let nus = symplectic_eigenvalues(&v.matrix)?;
    let min = nus.first().copied().unwrap_or(f64::INFINITY);
    Ok(PhysicalityReport { min_symplectic_eigenvalue: min, pass: min >= VACUUM - PHYSICALITY_SLACK })
}

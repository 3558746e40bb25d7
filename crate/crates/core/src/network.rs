//! Linearised fluctuation dynamics of the array: drift and diffusion matrices
//! and the stability classification of the steady state.
//!
//! Quadratures are ordered per site as `[X_j, Y_j, x_j, y_j]` (photon then
//! phonon), sites running from the lowest label upward.

use nalgebra::{DMatrix, Matrix4};

use crate::eigen;
use crate::error::Result;
use crate::meanfield::{solve_mean_fields, BranchNote, MeanFields};
use crate::model::{Boundary, LatticeParams};
use crate::exec;

/// Relative stability tolerance: points with `|abscissa| <= STAB_REL_TOL·‖A‖_F`
/// are marginal.
pub const STAB_REL_TOL: f64 = 1e-9;

/// The `4N × 4N` drift matrix `A`.
#[derive(Debug, Clone)]
pub struct DriftMatrix {
    pub n_sites: usize,
    pub boundary: Boundary,
    pub matrix: DMatrix<f64>,
}

impl DriftMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn block(&self, row_site: usize, col_site: usize) -> Matrix4<f64> {
        self.matrix.fixed_view::<4, 4>(4 * row_site, 4 * col_site).into_owned()
    }
}

/// Diagonal diffusion matrix `D`, stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix {
    pub diagonal: Vec<f64>,
}

impl DiffusionMatrix {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { diagonal: self.diagonal.iter().map(|d| d * s).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub spectral_abscissa: f64,
    pub stable: bool,
    /// Distance of the abscissa below zero, `-spectral_abscissa`.
    pub margin: f64,
    /// Stability tolerance applied to this matrix.
    pub tolerance: f64,
}

impl StabilityReport {
    pub fn from_abscissa(abscissa: f64, frobenius: f64) -> Self {
        let tolerance = STAB_REL_TOL * frobenius;
        Self {
            spectral_abscissa: abscissa,
            stable: abscissa < -tolerance,
            margin: -abscissa,
            tolerance,
        }
    }

    pub fn marginal(&self) -> bool {
        self.spectral_abscissa.abs() <= self.tolerance
    }
}

/// On-site block `B`.
pub fn site_block(params: &LatticeParams, mf: &MeanFields) -> Matrix4<f64> {
    let delta = mf.effective_detuning(params);
    let g_re = 2.0 * params.g0 * mf.alpha.re;
    let g_im = 2.0 * params.g0 * mf.alpha.im;
    let (k, gm, wm) = (params.kappa, params.gamma, params.omega_m);
    #[rustfmt::skip]
    let b = Matrix4::new(
        -k,    -delta, -g_im, 0.0,
        delta, -k,     g_re,  0.0,
        0.0,   0.0,    -gm,   wm,
        g_re,  g_im,   -wm,   -gm,
    );
    b
}

/// Nearest-neighbour hopping block `C`.
pub fn hopping_block(params: &LatticeParams) -> Matrix4<f64> {
    let (j, k) = (params.hop_optical, params.hop_mechanical);
    #[rustfmt::skip]
    let c = Matrix4::new(
        0.0, -j,  0.0, 0.0,
        j,   0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, -k,
        0.0, 0.0, k,   0.0,
    );
    c
}

pub fn assemble_drift(params: &LatticeParams, mf: &MeanFields) -> Result<DriftMatrix> {
    params.validate()?;
    let n = params.n_sites;
    let b = site_block(params, mf);
    let c = hopping_block(params);
    let mut a = DMatrix::zeros(4 * n, 4 * n);
    let mut add = |r: usize, s: usize, blk: &Matrix4<f64>| {
        let mut view = a.fixed_view_mut::<4, 4>(4 * r, 4 * s);
        view += blk;
    };
    for site in 0..n {
        add(site, site, &b);
        if site + 1 < n {
            add(site, site + 1, &c);
            add(site + 1, site, &c);
        }
    }
    if params.boundary == Boundary::Periodic {
        add(0, n - 1, &c);
        add(n - 1, 0, &c);
    }
    Ok(DriftMatrix { n_sites: n, boundary: params.boundary, matrix: a })
}

pub fn assemble_diffusion(params: &LatticeParams) -> Result<DiffusionMatrix> {
    params.validate()?;
    let mech = params.gamma * (2.0 * params.nbar_m + 1.0);
    let per_site = [params.kappa, params.kappa, mech, mech];
    let diagonal = (0..params.n_sites).flat_map(|_| per_site).collect();
    Ok(DiffusionMatrix { diagonal })
}

/// Largest real part over the spectrum of `a`.
pub fn spectral_abscissa(a: &DriftMatrix) -> Result<f64> {
    eigen::spectral_abscissa(&a.matrix)
}

pub fn stability(a: &DriftMatrix) -> Result<StabilityReport> {
    let abscissa = spectral_abscissa(a)?;
    Ok(StabilityReport::from_abscissa(abscissa, a.matrix.norm()))
}

/// Eigenvalues of the nearest-neighbour adjacency: `2cos(kπ/(N+1))` for an
/// open chain, `2cos(2πk/N)` for a ring.
pub fn hopping_spectrum(n_sites: usize, boundary: Boundary) -> Vec<f64> {
    use std::f64::consts::PI;
    match boundary {
        Boundary::Open => (1..=n_sites).map(|k| 2.0 * (k as f64 * PI / (n_sites + 1) as f64).cos()).collect(),
        Boundary::Periodic => (0..n_sites).map(|k| 2.0 * (2.0 * PI * k as f64 / n_sites as f64).cos()).collect(),
    }
}

/// Stability from the band decomposition `A ≅ ⊕ₖ (B + λₖ C)`, which holds
/// because every site carries the same mean field. Costs `N` 4×4 eigenvalue
/// problems instead of one `4N × 4N` one.
pub fn band_stability(params: &LatticeParams, mf: &MeanFields) -> Result<StabilityReport> {
    params.validate()?;
    let b = site_block(params, mf);
    let c = hopping_block(params);
    let mut abscissa = f64::NEG_INFINITY;
    for lambda in hopping_spectrum(params.n_sites, params.boundary) {
        let m = b + c * lambda;
        abscissa = abscissa.max(eigen::spectral_abscissa(&DMatrix::from_column_slice(4, 4, m.as_slice()))?);
    }
    let n = params.n_sites;
    let off_blocks = match params.boundary {
        Boundary::Open => 2 * n.saturating_sub(1),
        Boundary::Periodic => 2 * n,
    };
    let frobenius = (n as f64 * b.norm_squared() + off_blocks as f64 * c.norm_squared()).sqrt();
    Ok(StabilityReport::from_abscissa(abscissa, frobenius))
}

/// One cell of a stability map.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCell {
    pub detuning: f64,
    pub drive: f64,
    pub outcome: std::result::Result<(StabilityReport, BranchNote), String>,
}

impl StabilityCell {
    pub fn stable(&self) -> bool {
        matches!(&self.outcome, Ok((r, _)) if r.stable)
    }

    pub fn spectral_abscissa(&self) -> f64 {
        match &self.outcome {
            Ok((r, _)) => r.spectral_abscissa,
            Err(_) => f64::NAN,
        }
    }
}

fn stability_cell(base: &LatticeParams, detuning: f64, drive: f64) -> StabilityCell {
    let params = LatticeParams {
        detuning,
        drive: num_complex::Complex64::from_polar(drive, base.drive.arg()),
        ..*base
    };
    let outcome = solve_mean_fields(&params)
        .and_then(|mf| Ok((band_stability(&params, &mf)?, mf.branch_note)))
        .map_err(|e| e.to_string());
    StabilityCell { detuning, drive, outcome }
}

/// Stability over a detuning × drive grid, detuning-major.
///
/// The drive phase is taken from `base.drive`; grid values are magnitudes.
pub fn stability_map(base: &LatticeParams, detuning_grid: &[f64], drive_grid: &[f64]) -> Vec<StabilityCell> {
    stability_map_with(exec::Execution::default(), base, detuning_grid, drive_grid)
}

pub fn stability_map_with(
    execution: exec::Execution,
    base: &LatticeParams,
    detuning_grid: &[f64],
    drive_grid: &[f64],
) -> Vec<StabilityCell> {
    let cells: Vec<(f64, f64)> = detuning_grid
        .iter()
        .flat_map(|&d| drive_grid.iter().map(move |&e| (d, e)))
        .collect();
    exec::map_indexed(execution, &cells, |&(d, e)| stability_cell(base, d, e))
}

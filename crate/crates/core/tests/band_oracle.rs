//! Exact large-N check of the Lyapunov solver.
//!
//! For an open chain with uniform mean fields the sine transform
//! `S_jk = sqrt(2/(N+1)) sin(jkπ/(N+1))` block-diagonalises the drift into
//! `B + 2cos(kπ/(N+1)) C` while leaving the diffusion unchanged, so the
//! covariance is `V_ij = Σ_k S_ik S_jk V_k` with `V_k` from a 4×4 equation.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use std::f64::consts::PI;

use omcorr::meanfield::solve_mean_fields;
use omcorr::model::LatticeParams;
use omcorr::network::{assemble_diffusion, assemble_drift, hopping_block, site_block, DriftMatrix, DiffusionMatrix};
use omcorr::steadystate::{solve_lyapunov, solve_lyapunov_vectorized};

fn band_covariance(p: &LatticeParams) -> DMatrix<f64> {
    let mf = solve_mean_fields(p).unwrap();
    let (b, c) = (site_block(p, &mf), hopping_block(p));
    let n = p.n_sites;
    let d = assemble_diffusion(&LatticeParams { n_sites: 1, ..*p }).unwrap();
    let modes: Vec<Matrix4<f64>> = (1..=n)
        .map(|k| {
            let a = b + c * (2.0 * (k as f64 * PI / (n + 1) as f64).cos());
            let drift = DriftMatrix {
                n_sites: 1,
                boundary: p.boundary,
                matrix: DMatrix::from_column_slice(4, 4, a.as_slice()),
            };
            let v = solve_lyapunov_vectorized(&drift, &DiffusionMatrix { diagonal: d.diagonal.clone() }).unwrap();
            Matrix4::from_fn(|i, j| v.matrix[(i, j)])
        })
        .collect();
    let s = |j: usize, k: usize| (2.0 / (n + 1) as f64).sqrt() * ((j * k) as f64 * PI / (n + 1) as f64).sin();
    let mut v = DMatrix::zeros(4 * n, 4 * n);
    for i in 0..n {
        for j in 0..n {
            let mut blk = Matrix4::zeros();
            for (k, vk) in modes.iter().enumerate() {
                blk += vk * (s(i + 1, k + 1) * s(j + 1, k + 1));
            }
            v.fixed_view_mut::<4, 4>(4 * i, 4 * j).copy_from(&blk);
        }
    }
    v
}

fn check(p: LatticeParams) {
    let mf = solve_mean_fields(&p).unwrap();
    let a = assemble_drift(&p, &mf).unwrap();
    let d = assemble_diffusion(&p).unwrap();
    let dense = solve_lyapunov(&a, &d).unwrap().matrix;
    let band = band_covariance(&p);
    let scale = band.amax();
    let gap = (&dense - &band).amax() / scale;
    assert!(gap < 1e-9, "N={} Δ={} η={}: relative gap {gap:e}", p.n_sites, p.detuning, p.drive);
}

#[test]
fn large_chain_matches_band_solution() {
    check(LatticeParams::default());
    check(LatticeParams { detuning: -1.3, nbar_m: 0.5, ..Default::default() });
    check(LatticeParams { detuning: 1.5, drive: Complex64::new(500.0, 0.0), ..Default::default() });
}

#[test]
fn small_chains_match_band_solution() {
    for n in [1, 2, 5, 8] {
        check(LatticeParams { n_sites: n, allow_even_sites: true, detuning: -1.7, ..Default::default() });
    }
}

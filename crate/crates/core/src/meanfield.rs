//! Uniform steady-state classical amplitudes of the driven array.
//!
//! With a uniform background the photon number `P = |α|²` satisfies the real
//! cubic
//!
//! ```text
//! P · [(Δ + 2J + 2g₀cP)² + κ²] = |η|²,   c = g₀(ω_m − 2K) / ((ω_m − 2K)² + γ²)
//! ```
//!
//! and the amplitudes follow as `β = g₀P / (ω_m − 2K − iγ)` and
//! `α = iη / (Δ + iκ + 2J + 2g₀ Re β)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::LatticeParams;

/// Relative residual below which the self-consistency is declared converged.
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchNote {
    Unique,
    /// Several positive photon numbers solve the cubic; the lowest was taken.
    MultistableLowest,
}

impl BranchNote {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchNote::Unique => "unique",
            BranchNote::MultistableLowest => "multistable_lowest",
        }
    }
}

impl std::fmt::Display for BranchNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFields {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub photon_number: f64,
    pub converged: bool,
    pub branch_note: BranchNote,
}

impl MeanFields {
    /// Detuning seen by the fluctuations, `Δ + 2g₀ Re β`.
    pub fn effective_detuning(&self, params: &LatticeParams) -> f64 {
        params.detuning + 2.0 * params.g0 * self.beta.re
    }

    /// Relative residuals of the optical and mechanical steady-state equations.
    pub fn residuals(&self, params: &LatticeParams) -> (f64, f64) {
        let eta = params.drive;
        let optical_den = Complex64::new(
            params.detuning + 2.0 * params.hop_optical + 2.0 * params.g0 * self.beta.re,
            params.kappa,
        );
        let optical = (self.alpha * optical_den - Complex64::i() * eta).norm() / eta.norm().max(f64::MIN_POSITIVE);
        let optical = if eta.norm() == 0.0 { self.alpha.norm() } else { optical };

        let mech_den = Complex64::new(params.omega_m - 2.0 * params.hop_mechanical, -params.gamma);
        let source = params.g0 * self.alpha.norm_sqr();
        let mechanical = (self.beta * mech_den - source).norm();
        let mechanical = if source > 0.0 { mechanical / source } else { mechanical };
        (optical, mechanical)
    }
}

/// Real roots of `c3 x³ + c2 x² + c1 x + c0`, sorted ascending and Newton-polished.
///
/// Lower-degree polynomials are handled when leading coefficients vanish.
pub fn real_cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let mut roots = if c3 == 0.0 {
        real_quadratic_roots(c2, c1, c0)
    } else {
        let a = c2 / c3;
        let b = c1 / c3;
        let c = c0 / c3;
        let shift = a / 3.0;
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let half_q = 0.5 * q;
        let third_p = p / 3.0;
        let disc = half_q * half_q + third_p * third_p * third_p;
        let depressed: Vec<f64> = if p == 0.0 && q == 0.0 {
            vec![0.0]
        } else if disc > 0.0 {
            let u = (-half_q - half_q.signum() * disc.sqrt()).cbrt();
            let t = if u == 0.0 { 0.0 } else { u - third_p / u };
            vec![t]
        } else {
            let r = 2.0 * (-third_p).sqrt();
            let cos_arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
            let phi = cos_arg.acos() / 3.0;
            (0..3)
                .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
                .collect()
        };
        depressed.into_iter().map(|t| t - shift).collect()
    };
    for r in roots.iter_mut() {
        *r = newton_polish(c3, c2, c1, c0, *r);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

fn real_quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    vec![q / a, c / q]
}

fn newton_polish(c3: f64, c2: f64, c1: f64, c0: f64, mut x: f64) -> f64 {
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let mut fx = eval(x);
    for _ in 0..8 {
        let d = (3.0 * c3 * x + 2.0 * c2) * x + c1;
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - fx / d;
        let fnext = eval(next);
        if fnext.abs() >= fx.abs() {
            break;
        }
        x = next;
        fx = fnext;
    }
    x
}

/// Coefficients `[c3, c2, c1, c0]` of the photon-number cubic.
pub fn photon_number_cubic(params: &LatticeParams) -> [f64; 4] {
    let omega_eff = params.omega_m - 2.0 * params.hop_mechanical;
    let c = params.g0 * omega_eff / (omega_eff * omega_eff + params.gamma * params.gamma);
    let s = 2.0 * params.g0 * c;
    let d0 = params.detuning + 2.0 * params.hop_optical;
    [s * s, 2.0 * d0 * s, d0 * d0 + params.kappa * params.kappa, -params.drive.norm_sqr()]
}

pub fn solve_mean_fields(params: &LatticeParams) -> Result<MeanFields> {
    params.validate()?;
    let eta = params.drive;
    if eta.norm() == 0.0 {
        return Ok(MeanFields {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            photon_number: 0.0,
            converged: true,
            branch_note: BranchNote::Unique,
        });
    }

    let [c3, c2, c1, c0] = photon_number_cubic(params);
    let positive: Vec<f64> =
        real_cubic_roots(c3, c2, c1, c0).into_iter().filter(|&p| p > 0.0).collect();
    let Some(&photons) = positive.first() else {
        let at_zero = c0.abs();
        return Err(Error::MeanField(at_zero));
    };
    let branch_note = if positive.len() > 1 {
        // Coincident roots from a tangency are a single physical branch.
        let distinct = positive.windows(2).any(|w| (w[1] - w[0]).abs() > 1e-9 * w[1].abs());
        if distinct { BranchNote::MultistableLowest } else { BranchNote::Unique }
    } else {
        BranchNote::Unique
    };

    let mech_den = Complex64::new(params.omega_m - 2.0 * params.hop_mechanical, -params.gamma);
    let beta = params.g0 * photons / mech_den;
    let optical_den = Complex64::new(
        params.detuning + 2.0 * params.hop_optical + 2.0 * params.g0 * beta.re,
        params.kappa,
    );
    let alpha = Complex64::i() * eta / optical_den;
    let mut mf = MeanFields {
        alpha,
        beta,
        photon_number: alpha.norm_sqr(),
        converged: false,
        branch_note,
    };
    let (r_opt, r_mech) = mf.residuals(params);
    mf.converged = r_opt <= RESIDUAL_TOL && r_mech <= RESIDUAL_TOL;
    Ok(mf)
}

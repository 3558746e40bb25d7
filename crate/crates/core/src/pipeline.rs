//! Mean field → drift/diffusion → stability → steady-state covariance for a
//! single parameter point.

use crate::error::Result;
use crate::linalg::RealSchur;
use crate::meanfield::{solve_mean_fields, MeanFields};
use crate::model::LatticeParams;
use crate::network::{assemble_diffusion, assemble_drift, DiffusionMatrix, DriftMatrix, StabilityReport};
use crate::steadystate::{solve_lyapunov_with_schur, CovarianceMatrix};

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub params: LatticeParams,
    pub mean_fields: MeanFields,
    pub drift: DriftMatrix,
    pub diffusion: DiffusionMatrix,
    pub stability: StabilityReport,
    /// Present only when the point is stable.
    pub covariance: Option<CovarianceMatrix>,
}

/// Run the whole chain for one parameter set.
///
/// Unstable points return `Ok` with `covariance = None`; only numerical
/// failures are errors.
pub fn evaluate(params: &LatticeParams) -> Result<SteadyState> {
    let mean_fields = solve_mean_fields(params)?;
    let drift = assemble_drift(params, &mean_fields)?;
    let diffusion = assemble_diffusion(params)?;
    let schur = RealSchur::new(&drift.matrix)?;
    let stability = StabilityReport::from_abscissa(schur.spectral_abscissa(), drift.matrix.norm());
    let covariance = if stability.stable {
        Some(solve_lyapunov_with_schur(&drift, &schur, &diffusion)?)
    } else {
        None
    };
    Ok(SteadyState { params: *params, mean_fields, drift, diffusion, stability, covariance })
}

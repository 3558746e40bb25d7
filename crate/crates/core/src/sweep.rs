//! One-dimensional parameter sweeps producing per-pair correlation records.

use serde::{Deserialize, Serialize};

use crate::correlations::{measure_value, reduce, LogBase, Measure, ModeRef, Species};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::meanfield::BranchNote;
use crate::model::{LatticeParams, SiteIndex};
use crate::pipeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Detuning,
    /// Drive magnitude; the phase of the base drive is kept.
    Drive,
    /// Thermal phonon occupancy.
    Thermal,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Detuning => "detuning",
            Axis::Drive => "drive",
            Axis::Thermal => "thermal",
        }
    }

    pub fn apply(self, base: &LatticeParams, value: f64) -> LatticeParams {
        let mut p = *base;
        match self {
            Axis::Detuning => p.detuning = value,
            Axis::Drive => p.drive = num_complex::Complex64::from_polar(value, base.drive.arg()),
            Axis::Thermal => p.nbar_m = value,
        }
        p
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "detuning" => Ok(Axis::Detuning),
            "drive" => Ok(Axis::Drive),
            "thermal" | "nbar_m" => Ok(Axis::Thermal),
            other => Err(Error::Config(format!("unknown sweep axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairSelection {
    Explicit(Vec<(ModeRef, ModeRef)>),
    /// Every pair of `(species_a, species_b)` modes; unordered when the
    /// species coincide.
    AllPairs(Species, Species),
}

impl PairSelection {
    pub fn resolve(&self, n_sites: usize) -> Result<Vec<(ModeRef, ModeRef)>> {
        match self {
            PairSelection::Explicit(pairs) => {
                for (m1, m2) in pairs {
                    SiteIndex::new(m1.site.label(), n_sites)?;
                    SiteIndex::new(m2.site.label(), n_sites)?;
                    if m1 == m2 {
                        return Err(Error::IdenticalModes);
                    }
                }
                Ok(pairs.clone())
            }
            PairSelection::AllPairs(sa, sb) => {
                let mut out = Vec::new();
                for i in 0..n_sites {
                    for j in 0..n_sites {
                        if sa == sb && j <= i {
                            continue;
                        }
                        out.push((
                            ModeRef::new(SiteIndex::from_offset(i, n_sites), *sa),
                            ModeRef::new(SiteIndex::from_offset(j, n_sites), *sb),
                        ));
                    }
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: LatticeParams,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub pairs: PairSelection,
    pub measures: Vec<Measure>,
    pub log_base: LogBase,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<Vec<(ModeRef, ModeRef)>> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("sweep value {v} is not finite")));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("sweep needs at least one measure".into()));
        }
        self.base.validate()?;
        self.pairs.resolve(self.base.n_sites)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub axis: Axis,
    pub axis_value: f64,
    pub pair: (ModeRef, ModeRef),
    pub measure: Measure,
    /// Present only for stable points that evaluated cleanly.
    pub value: Option<f64>,
    pub stable: bool,
    pub spectral_abscissa: f64,
    pub stability_tolerance: f64,
    pub branch_note: Option<BranchNote>,
    pub error: Option<String>,
}

fn point_records(
    spec: &SweepSpec,
    pairs: &[(ModeRef, ModeRef)],
    value: f64,
) -> Vec<ResultRecord> {
    let params = spec.axis.apply(&spec.base, value);
    let blank = |pair, measure| ResultRecord {
        axis: spec.axis,
        axis_value: value,
        pair,
        measure,
        value: None,
        stable: false,
        spectral_abscissa: f64::NAN,
        stability_tolerance: f64::NAN,
        branch_note: None,
        error: None,
    };
    let mut out = Vec::with_capacity(pairs.len() * spec.measures.len());
    match pipeline::evaluate(&params) {
        Err(e) => {
            let msg = e.to_string();
            for &pair in pairs {
                for &m in &spec.measures {
                    out.push(ResultRecord { error: Some(msg.clone()), ..blank(pair, m) });
                }
            }
        }
        Ok(state) => {
            for &pair in pairs {
                for &m in &spec.measures {
                    let mut rec = ResultRecord {
                        stable: state.stability.stable,
                        spectral_abscissa: state.stability.spectral_abscissa,
                        stability_tolerance: state.stability.tolerance,
                        branch_note: Some(state.mean_fields.branch_note),
                        ..blank(pair, m)
                    };
                    if let Some(v) = &state.covariance {
                        match reduce(v, pair.0, pair.1).and_then(|r| measure_value(&r, m, spec.log_base)) {
                            Ok(x) => rec.value = Some(x),
                            Err(e) => rec.error = Some(e.to_string()),
                        }
                    }
                    out.push(rec);
                }
            }
        }
    }
    out
}

/// Evaluate the sweep; ordering is (axis index, pair index, measure index).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRecord>> {
    run_sweep_with(Execution::default(), spec)
}

pub fn run_sweep_with(execution: Execution, spec: &SweepSpec) -> Result<Vec<ResultRecord>> {
    let pairs = spec.validate()?;
    let per_point = exec::map_indexed(execution, &spec.values, |&v| point_records(spec, &pairs, v));
    Ok(per_point.into_iter().flatten().collect())
}

//! TOML configuration. Keys under `[lattice]` are the `LatticeParams` field
//! names; `drive` is the magnitude and `drive_phase` its phase in radians.
//!
//! ```toml
//! units = "normalized"      # or "absolute": rates in rad/s, divided by hop_optical
//! log_base = "10"
//!
//! [lattice]
//! n_sites = 101
//! detuning = -2.5
//! drive = 15.0
//!
//! [sweep]
//! axis = "detuning"
//! values = [-2.5, -2.1, -1.7]
//! measures = ["negativity", "discord"]
//! all_pairs = ["photon", "phonon"]
//!
//! [stability_map]
//! detuning = { start = -3.0, stop = 3.0, count = 50 }
//! drive = [10.0, 20.0]
//!
//! [corr_map]
//! species_a = "photon"
//! species_b = "phonon"
//! measure = "discord"
//!
//! [thermal]
//! frequency_hz = 9e9
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::correlations::{LogBase, Measure, ModeRef, Species};
use crate::error::{Error, Result};
use crate::model::{thermal_occupation, Boundary, LatticeParams, SiteIndex};
use crate::sweep::{Axis, PairSelection, SweepSpec};

/// Mechanical frequency used for thermal conversions when none is given.
pub const DEFAULT_MECHANICAL_HZ: f64 = 9e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Normalized,
    Absolute,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub log_base: Option<LogBase>,
    #[serde(default)]
    pub lattice: LatticeSection,
    pub sweep: Option<SweepSection>,
    pub stability_map: Option<StabilityMapSection>,
    pub corr_map: Option<CorrMapSection>,
    #[serde(default)]
    pub thermal: ThermalSection,
}

/// Missing keys fall back to [`LatticeParams::default`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub n_sites: Option<usize>,
    pub detuning: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub omega_m: Option<f64>,
    pub g0: Option<f64>,
    pub hop_optical: Option<f64>,
    pub hop_mechanical: Option<f64>,
    pub drive: Option<f64>,
    pub drive_phase: Option<f64>,
    pub nbar_m: Option<f64>,
    pub boundary: Option<Boundary>,
    pub allow_even_sites: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    /// Inclusive, evenly spaced.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::Config("range count must be >= 1".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(Range),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range(r) => r.values(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub site_a: i64,
    pub species_a: Species,
    pub site_b: i64,
    pub species_b: Species,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub values: Grid,
    pub measures: Vec<String>,
    #[serde(default)]
    pub pairs: Vec<PairEntry>,
    pub all_pairs: Option<[Species; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityMapSection {
    pub detuning: Grid,
    pub drive: Grid,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrMapSection {
    pub species_a: Species,
    pub species_b: Species,
    pub measure: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSection {
    /// Mechanical frequency ω_m/2π in Hz.
    pub frequency_hz: Option<f64>,
    /// If set, replaces `lattice.nbar_m` with the Bose-Einstein occupancy.
    pub temperature_k: Option<f64>,
}

impl ThermalSection {
    pub fn angular_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency_hz.unwrap_or(DEFAULT_MECHANICAL_HZ)
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Divisor applied to every rate: 1 in normalized mode, J otherwise.
    pub fn rate_unit(&self) -> Result<f64> {
        match self.units {
            Units::Normalized => {
                if let Some(j) = self.lattice.hop_optical {
                    if j != 1.0 {
                        return Err(Error::Config(format!(
                            "normalized units require hop_optical = 1, got {j}"
                        )));
                    }
                }
                Ok(1.0)
            }
            Units::Absolute => match self.lattice.hop_optical {
                Some(j) if j.is_finite() && j > 0.0 => Ok(j),
                Some(j) => Err(Error::Config(format!("hop_optical must be > 0 in absolute units, got {j}"))),
                None => Err(Error::Config("absolute units require hop_optical".into())),
            },
        }
    }

    /// Lattice parameters in units of J, not yet validated.
    pub fn lattice_params(&self) -> Result<LatticeParams> {
        let unit = self.rate_unit()?;
        let l = &self.lattice;
        let d = LatticeParams::default();
        let rate = |v: Option<f64>, default: f64| v.map_or(default, |x| x / unit);
        let mut p = LatticeParams {
            n_sites: l.n_sites.unwrap_or(d.n_sites),
            detuning: rate(l.detuning, d.detuning),
            kappa: rate(l.kappa, d.kappa),
            gamma: rate(l.gamma, d.gamma),
            omega_m: rate(l.omega_m, d.omega_m),
            g0: rate(l.g0, d.g0),
            hop_optical: 1.0,
            hop_mechanical: rate(l.hop_mechanical, d.hop_mechanical),
            drive: Complex64::from_polar(rate(l.drive, d.drive.norm()), l.drive_phase.unwrap_or(0.0)),
            nbar_m: l.nbar_m.unwrap_or(d.nbar_m),
            boundary: l.boundary.unwrap_or(d.boundary),
            allow_even_sites: l.allow_even_sites.unwrap_or(d.allow_even_sites),
        };
        if let Some(t) = self.thermal.temperature_k {
            p.nbar_m = thermal_occupation(self.thermal.angular_frequency(), t)?;
        }
        Ok(p)
    }

    pub fn log_base(&self) -> LogBase {
        self.log_base.unwrap_or_default()
    }

    /// Scale applied to values on `axis`: rates follow the unit, occupancies
    /// do not.
    pub fn axis_unit(&self, axis: Axis) -> Result<f64> {
        match axis {
            Axis::Detuning | Axis::Drive => self.rate_unit(),
            Axis::Thermal => Ok(1.0),
        }
    }

    pub fn sweep_spec(&self, base: LatticeParams) -> Result<SweepSpec> {
        let s = self.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
        let axis: Axis = s.axis.parse()?;
        let unit = self.axis_unit(axis)?;
        let values = s.values.values()?.into_iter().map(|v| v / unit).collect();
        let measures = s.measures.iter().map(|m| m.parse()).collect::<Result<Vec<Measure>>>()?;
        let pairs = match (&s.all_pairs, s.pairs.is_empty()) {
            (Some([a, b]), true) => PairSelection::AllPairs(*a, *b),
            (None, false) => PairSelection::Explicit(
                s.pairs
                    .iter()
                    .map(|e| {
                        Ok((
                            ModeRef::new(SiteIndex::new(e.site_a, base.n_sites)?, e.species_a),
                            ModeRef::new(SiteIndex::new(e.site_b, base.n_sites)?, e.species_b),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            (Some(_), false) => return Err(Error::Config("give either pairs or all_pairs, not both".into())),
            (None, true) => return Err(Error::Config("sweep needs pairs or all_pairs".into())),
        };
        Ok(SweepSpec { base, axis, values, pairs, measures, log_base: self.log_base() })
    }

    /// `(detuning grid, drive grid)` in units of J.
    pub fn stability_grids(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let s = self
            .stability_map
            .as_ref()
            .ok_or_else(|| Error::Config("missing [stability_map] section".into()))?;
        let unit = self.rate_unit()?;
        let scale = |g: &Grid| -> Result<Vec<f64>> { Ok(g.values()?.into_iter().map(|v| v / unit).collect()) };
        Ok((scale(&s.detuning)?, scale(&s.drive)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default_lattice() {
        let c = ConfigFile::parse("").unwrap();
        assert_eq!(c.lattice_params().unwrap(), LatticeParams::default());
        assert_eq!(c.log_base(), LogBase::Ten);
    }

    #[test]
    fn lattice_keys_and_phase() {
        let c = ConfigFile::parse(
            "log_base = \"e\"\n[lattice]\nn_sites = 5\ndrive = 2.0\ndrive_phase = 1.5707963267948966\nboundary = \"periodic\"\n",
        )
        .unwrap();
        let p = c.lattice_params().unwrap();
        assert_eq!(p.n_sites, 5);
        assert_eq!(p.boundary, Boundary::Periodic);
        assert!((p.drive - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(c.log_base(), LogBase::Natural);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigFile::parse("[lattice]\nkapa = 0.1\n").is_err());
        assert!(ConfigFile::parse("colour = 1\n").is_err());
    }

    #[test]
    fn absolute_units_divide_by_hopping() {
        let c = ConfigFile::parse(
            "units = \"absolute\"\n[lattice]\nhop_optical = 2.0e6\nkappa = 2.0e5\ndetuning = -5.0e6\ndrive = 3.0e7\n\
             [stability_map]\ndetuning = [-2.0e6]\ndrive = { start = 0.0, stop = 4.0e6, count = 3 }\n",
        )
        .unwrap();
        let p = c.lattice_params().unwrap();
        assert_eq!(p.hop_optical, 1.0);
        assert!((p.kappa - 0.1).abs() < 1e-15);
        assert!((p.detuning + 2.5).abs() < 1e-15);
        assert!((p.drive.re - 15.0).abs() < 1e-12);
        let (d, e) = c.stability_grids().unwrap();
        assert_eq!(d, vec![-1.0]);
        assert_eq!(e, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn normalized_requires_unit_hopping() {
        let c = ConfigFile::parse("[lattice]\nhop_optical = 2.0\n").unwrap();
        assert!(c.lattice_params().is_err());
    }

    #[test]
    fn sweep_section() {
        let c = ConfigFile::parse(
            "[lattice]\nn_sites = 3\n[sweep]\naxis = \"thermal\"\nvalues = { start = 0.0, stop = 1.0, count = 5 }\n\
             measures = [\"discord\"]\npairs = [{ site_a = -1, species_a = \"photon\", site_b = 1, species_b = \"phonon\" }]\n",
        )
        .unwrap();
        let spec = c.sweep_spec(c.lattice_params().unwrap()).unwrap();
        assert_eq!(spec.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(spec.axis, Axis::Thermal);
        match spec.pairs {
            PairSelection::Explicit(p) => assert_eq!(p[0].1.site.label(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn temperature_sets_occupancy() {
        let c = ConfigFile::parse("[thermal]\ntemperature_k = 0.0\n[lattice]\nnbar_m = 3.0\n").unwrap();
        assert_eq!(c.lattice_params().unwrap().nbar_m, 0.0);
    }
}

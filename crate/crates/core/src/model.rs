//! Physical parameters of the array, site labelling, and Bose occupancy conversions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Uniform parameters of a driven 1-D optomechanical array.
///
/// Rates are expressed in whatever unit the caller chose; configuration
/// files in normalized mode fix `hop_optical = 1` so that every rate is in
/// units of the photon hopping rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub n_sites: usize,
    /// Laser minus cavity frequency.
    pub detuning: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub omega_m: f64,
    pub g0: f64,
    pub hop_optical: f64,
    pub hop_mechanical: f64,
    /// Uniform drive amplitude; magnitude and phase.
    pub drive: Complex64,
    pub nbar_m: f64,
    pub boundary: Boundary,
    /// Permit an even number of sites (labels `-N/2 ..= N/2 - 1`).
    pub allow_even_sites: bool,
}

impl Default for LatticeParams {
    /// The zero-temperature array used throughout the detuning sweeps:
    /// 101 sites, κ=0.1, γ=0.002, ω_m=0.1, g₀=1e-4, K=0.05, η=15, Δ=-2.5.
    fn default() -> Self {
        Self {
            n_sites: 101,
            detuning: -2.5,
            kappa: 0.1,
            gamma: 0.002,
            omega_m: 0.1,
            g0: 1e-4,
            hop_optical: 1.0,
            hop_mechanical: 0.05,
            drive: Complex64::new(15.0, 0.0),
            nbar_m: 0.0,
            boundary: Boundary::Open,
            allow_even_sites: false,
        }
    }
}

impl LatticeParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("detuning", self.detuning),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("omega_m", self.omega_m),
            ("g0", self.g0),
            ("hop_optical", self.hop_optical),
            ("hop_mechanical", self.hop_mechanical),
            ("drive.re", self.drive.re),
            ("drive.im", self.drive.im),
            ("nbar_m", self.nbar_m),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        let positive = [("kappa", self.kappa), ("gamma", self.gamma), ("omega_m", self.omega_m)];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.g0 < 0.0 {
            return Err(Error::InvalidParameter(format!("g0 must be >= 0, got {}", self.g0)));
        }
        if self.nbar_m < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "nbar_m must be >= 0, got {}",
                self.nbar_m
            )));
        }
        if self.n_sites == 0 {
            return Err(Error::InvalidParameter("n_sites must be >= 1".into()));
        }
        if self.n_sites % 2 == 0 && !self.allow_even_sites {
            return Err(Error::InvalidParameter(format!(
                "n_sites must be odd (got {}); set allow_even_sites to override",
                self.n_sites
            )));
        }
        if self.boundary == Boundary::Periodic && self.n_sites < 3 {
            return Err(Error::InvalidParameter(
                "periodic boundary needs at least 3 sites".into(),
            ));
        }
        Ok(())
    }

    /// Quadrature dimension `4N`.
    pub fn dim(&self) -> usize {
        4 * self.n_sites
    }

    pub fn site(&self, label: i64) -> Result<SiteIndex> {
        SiteIndex::new(label, self.n_sites)
    }

    /// Lowest site label, `-(N-1)/2` for odd N and `-N/2` for even N.
    pub fn min_site(&self) -> i64 {
        -((self.n_sites / 2) as i64)
    }

    pub fn max_site(&self) -> i64 {
        self.min_site() + self.n_sites as i64 - 1
    }

    pub fn site_labels(&self) -> impl Iterator<Item = i64> {
        self.min_site()..=self.max_site()
    }
}

/// Symmetric site label `j`; the central site is `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex(i64);

impl SiteIndex {
    pub fn new(label: i64, n_sites: usize) -> Result<Self> {
        let lo = -((n_sites / 2) as i64);
        let hi = lo + n_sites as i64 - 1;
        if label < lo || label > hi {
            return Err(Error::InvalidParameter(format!(
                "site {label} outside [{lo}, {hi}] for {n_sites} sites"
            )));
        }
        Ok(Self(label))
    }

    pub fn from_offset(offset: usize, n_sites: usize) -> Self {
        Self(offset as i64 - (n_sites / 2) as i64)
    }

    pub fn label(self) -> i64 {
        self.0
    }

    /// Array offset `j + floor(N/2)`.
    pub fn offset(self, n_sites: usize) -> usize {
        (self.0 + (n_sites / 2) as i64) as usize
    }
}

impl std::fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bose-Einstein occupancy of a mode at angular frequency `frequency` (rad/s)
/// and temperature `temperature` (K).
pub fn thermal_occupation(frequency: f64, temperature: f64) -> Result<f64> {
    if !frequency.is_finite() || !temperature.is_finite() {
        return Err(Error::InvalidParameter("thermal inputs must be finite".into()));
    }
    if frequency <= 0.0 {
        return Err(Error::InvalidParameter(format!("frequency must be > 0, got {frequency}")));
    }
    if temperature < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * frequency / (BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Inverse of [`thermal_occupation`] in the temperature argument.
pub fn temperature_from_occupation(frequency: f64, occupancy: f64) -> Result<f64> {
    if !frequency.is_finite() || !occupancy.is_finite() {
        return Err(Error::InvalidParameter("thermal inputs must be finite".into()));
    }
    if frequency <= 0.0 {
        return Err(Error::InvalidParameter(format!("frequency must be > 0, got {frequency}")));
    }
    if occupancy <= 0.0 {
        return Err(Error::InvalidParameter(format!("occupancy must be > 0, got {occupancy}")));
    }
    Ok(HBAR * frequency / (BOLTZMANN * (1.0 / occupancy).ln_1p()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const OMEGA_9GHZ: f64 = 2.0 * PI * 9e9;

    #[test]
    fn dilution_fridge_occupancy() {
        let n = thermal_occupation(OMEGA_9GHZ, 0.15).unwrap();
        assert!((n - 0.060).abs() <= 0.002, "{n}");
    }

    #[test]
    fn hot_bath_occupancy() {
        let n = thermal_occupation(OMEGA_9GHZ, 5.59).unwrap();
        assert!((n / 12.5 - 1.0).abs() <= 0.03, "{n}");
    }

    #[test]
    fn zero_temperature_is_empty() {
        assert_eq!(thermal_occupation(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(thermal_occupation(OMEGA_9GHZ, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn quoted_temperatures() {
        let t = temperature_from_occupation(OMEGA_9GHZ, 0.5).unwrap();
        assert!((t - 0.39).abs() <= 0.01, "{t}");
        let t = temperature_from_occupation(OMEGA_9GHZ, 2.5).unwrap();
        assert!((t - 1.28).abs() <= 0.01, "{t}");
    }

    #[test]
    fn rejects_bad_thermal_inputs() {
        assert!(thermal_occupation(f64::NAN, 1.0).is_err());
        assert!(thermal_occupation(1.0, f64::INFINITY).is_err());
        assert!(thermal_occupation(-1.0, 1.0).is_err());
        assert!(temperature_from_occupation(1.0, 0.0).is_err());
        assert!(temperature_from_occupation(1.0, -2.0).is_err());
    }

    #[test]
    fn site_labels_are_symmetric() {
        let p = LatticeParams::default();
        assert_eq!(p.min_site(), -50);
        assert_eq!(p.max_site(), 50);
        assert_eq!(p.site(-50).unwrap().offset(101), 0);
        assert_eq!(p.site(50).unwrap().offset(101), 100);
        assert!(p.site(51).is_err());
        assert_eq!(SiteIndex::from_offset(50, 101).label(), 0);
    }

    #[test]
    fn even_sites_need_flag() {
        let mut p = LatticeParams { n_sites: 4, ..Default::default() };
        assert!(p.validate().is_err());
        p.allow_even_sites = true;
        p.validate().unwrap();
        assert_eq!(p.min_site(), -2);
        assert_eq!(p.max_site(), 1);
        assert_eq!(p.site(-2).unwrap().offset(4), 0);
    }

    #[test]
    fn validation_rejects_nonphysical_rates() {
        for p in [
            LatticeParams { kappa: 0.0, ..Default::default() },
            LatticeParams { gamma: -1.0, ..Default::default() },
            LatticeParams { omega_m: 0.0, ..Default::default() },
            LatticeParams { nbar_m: -0.1, ..Default::default() },
            LatticeParams { g0: f64::NAN, ..Default::default() },
            LatticeParams { n_sites: 0, ..Default::default() },
            LatticeParams { n_sites: 1, boundary: Boundary::Periodic, ..Default::default() },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
        LatticeParams::default().validate().unwrap();
    }

    proptest! {
        #[test]
        fn occupancy_round_trip(log_f in 6.0f64..13.0, n in 1e-3f64..1e3) {
            let f = 10f64.powf(log_f);
            let t = temperature_from_occupation(f, n).unwrap();
            let back = thermal_occupation(f, t).unwrap();
            prop_assert!((back / n - 1.0).abs() <= 1e-12, "{} vs {}", back, n);
        }

        #[test]
        fn occupancy_monotone(log_f in 8.0f64..11.0, t in 0.1f64..10.0, dt in 1e-3f64..1.0) {
            let f = 10f64.powf(log_f);
            let lo = thermal_occupation(f, t).unwrap();
            prop_assert!(thermal_occupation(f, t + dt).unwrap() > lo);
            prop_assert!(thermal_occupation(f * 1.01, t).unwrap() < lo);
        }
    }
}

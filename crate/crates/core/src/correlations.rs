//! Two-mode correlation measures extracted from the steady-state covariance:
//! logarithmic negativity and Gaussian quantum discord.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::model::SiteIndex;
use crate::steadystate::{self, CovarianceMatrix, PHYSICALITY_SLACK, VACUUM};

/// Negative discriminants above this value are treated as rounding noise.
pub const DISCRIMINANT_SLACK: f64 = 1e-12;
/// `det V_C²` below which the discord minimisation uses the uncorrelated branch.
pub const DEGENERATE_C2: f64 = 1e-12;
/// Tolerance below 1 accepted for entropy-function arguments.
pub const ENTROPY_ARG_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Photon,
    Phonon,
}

impl Species {
    pub fn as_str(self) -> &'static str {
        match self {
            Species::Photon => "photon",
            Species::Phonon => "phonon",
        }
    }

    /// First quadrature row within a site's `[X, Y, x, y]` quadruple.
    fn quadrature_offset(self) -> usize {
        match self {
            Species::Photon => 0,
            Species::Phonon => 2,
        }
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "photon" | "optical" => Ok(Species::Photon),
            "phonon" | "mechanical" => Ok(Species::Phonon),
            other => Err(Error::Config(format!("unknown species {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeRef {
    pub site: SiteIndex,
    pub species: Species,
}

impl ModeRef {
    pub fn new(site: SiteIndex, species: Species) -> Self {
        Self { site, species }
    }

    /// Row of the mode's first quadrature in the full covariance matrix.
    pub fn row(self, n_sites: usize) -> usize {
        4 * self.site.offset(n_sites) + self.species.quadrature_offset()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Negativity,
    Discord,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Negativity => "negativity",
            Measure::Discord => "discord",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negativity" | "en" => Ok(Measure::Negativity),
            "discord" | "dg" => Ok(Measure::Discord),
            other => Err(Error::Config(format!("unknown measure {other:?}"))),
        }
    }
}

/// Logarithm base of the entropy function used by the discord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "10")]
    Ten,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    Natural,
}

impl LogBase {
    fn ln_base(self) -> f64 {
        match self {
            LogBase::Ten => std::f64::consts::LN_10,
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Natural => 1.0,
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "10" => Ok(LogBase::Ten),
            "2" => Ok(LogBase::Two),
            "e" | "natural" => Ok(LogBase::Natural),
            other => Err(Error::Config(format!("unknown log base {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Formula as written with `(det V_A, det V_B)`.
    A,
    /// Roles of the two modes exchanged.
    B,
}

/// Symplectic invariants `(det V_A, det V_B, det V_C, det V_R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Two-mode covariance `[[V_A, V_C], [V_Cᵀ, V_B]]` with vacuum variance 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCM {
    pub matrix: Matrix4<f64>,
}

impl ReducedCM {
    pub fn new(matrix: Matrix4<f64>) -> Self {
        Self { matrix }
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Invariants of `scale · R`.
    pub fn invariants(&self, scale: f64) -> Invariants {
        let s2 = scale * scale;
        Invariants {
            a: s2 * self.block_a().determinant(),
            b: s2 * self.block_b().determinant(),
            c: s2 * self.block_c().determinant(),
            d: s2 * s2 * self.matrix.determinant(),
        }
    }

    /// The two symplectic eigenvalues `(ν₋, ν₊)` of the unscaled state.
    ///
    /// Computed from a symmetric eigenproblem rather than the invariant
    /// formula, which loses half the digits when `ν₋ ≈ ν₊`.
    pub fn symplectic_eigenvalues(&self) -> Result<(f64, f64)> {
        let nus = steadystate::symplectic_eigenvalues(&DMatrix::from_fn(4, 4, |i, j| self.matrix[(i, j)]))?;
        Ok((nus[0], nus[1]))
    }

    /// State with the second mode's momentum reflected.
    pub fn partial_transpose(&self) -> Self {
        let sign = [1.0, 1.0, 1.0, -1.0];
        Self { matrix: Matrix4::from_fn(|i, j| sign[i] * sign[j] * self.matrix[(i, j)]) }
    }

    fn check_physical(&self) -> Result<()> {
        let (lo, _) = self.symplectic_eigenvalues()?;
        if lo < VACUUM - PHYSICALITY_SLACK {
            return Err(Error::Unphysical(format!(
                "two-mode symplectic eigenvalue {lo} below vacuum"
            )));
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        let p = [2, 3, 0, 1];
        Self { matrix: Matrix4::from_fn(|i, j| self.matrix[(p[i], p[j])]) }
    }
}

pub fn reduce(v: &CovarianceMatrix, m1: ModeRef, m2: ModeRef) -> Result<ReducedCM> {
    if m1 == m2 {
        return Err(Error::IdenticalModes);
    }
    let n = v.n_sites;
    for m in [m1, m2] {
        SiteIndex::new(m.site.label(), n)?;
    }
    let r1 = m1.row(n);
    let r2 = m2.row(n);
    let rows = [r1, r1 + 1, r2, r2 + 1];
    Ok(ReducedCM::new(Matrix4::from_fn(|i, j| v.matrix[(rows[i], rows[j])])))
}

/// Logarithmic negativity `max(0, −ln 2ν̃₋)` from the partially transposed state.
pub fn log_negativity(r: &ReducedCM) -> Result<f64> {
    r.check_physical()?;
    let (nu_minus, _) = r.partial_transpose().symplectic_eigenvalues()?;
    let en = -(2.0 * nu_minus).ln();
    Ok(if en > 0.0 { en } else { 0.0 })
}

/// `f(x) = ((x+1)/2) log((x+1)/2) − ((x−1)/2) log((x−1)/2)` for `x ≥ 1`.
pub fn entropy_function(x: f64, base: LogBase) -> Result<f64> {
    if !x.is_finite() || x < 1.0 - ENTROPY_ARG_SLACK {
        return Err(Error::Unphysical(format!("entropy argument {x} below 1")));
    }
    let u = 0.5 * (x - 1.0);
    if u <= 0.0 {
        return Ok(0.0);
    }
    // (1+u) ln(1+u) − u ln u, with ln_1p keeping the small-u end accurate.
    Ok(((1.0 + u) * u.ln_1p() - u * u.ln()) / base.ln_base())
}

/// Optimal conditional determinant `inf det ε` for measurements on the mode
/// carrying invariant `b`.
fn conditional_determinant(inv: Invariants) -> Result<f64> {
    let Invariants { a, b, c, d } = inv;
    let c2 = c * c;
    let use_first = c2 >= DEGENERATE_C2 && (d - a * b).powi(2) <= (1.0 + b) * c2 * (a + d);
    let eps = if use_first {
        let inner = c2 + (b - 1.0) * (d - a);
        if inner < -DISCRIMINANT_SLACK {
            return Err(Error::Unphysical(format!("negative conditional radicand {inner:e}")));
        }
        let num = c.abs() + inner.max(0.0).sqrt();
        num * num / ((b - 1.0) * (b - 1.0))
    } else {
        let radicand = if c2 < DEGENERATE_C2 {
            (d - a * b).powi(2)
        } else {
            c2 * c2 + (d - a * b).powi(2) - 2.0 * c2 * (d + a * b)
        };
        if radicand < -DISCRIMINANT_SLACK {
            return Err(Error::Unphysical(format!("negative conditional radicand {radicand:e}")));
        }
        (a * b - c2 + d - radicand.max(0.0).sqrt()) / (2.0 * b)
    };
    if !(eps >= -DISCRIMINANT_SLACK) {
        return Err(Error::Unphysical(format!("negative conditional determinant {eps:e}")));
    }
    Ok(eps.max(0.0))
}

/// Directional Gaussian discord `f(√b) − f(ν₋) − f(ν₊) + f(√ε)`, evaluated on
/// `2R` so the vacuum has unit invariants.
pub fn gaussian_discord_directional(r: &ReducedCM, direction: Direction, base: LogBase) -> Result<f64> {
    r.check_physical()?;
    let mut inv = r.invariants(2.0);
    if direction == Direction::B {
        std::mem::swap(&mut inv.a, &mut inv.b);
    }
    let (nu_minus, nu_plus) = r.symplectic_eigenvalues()?;
    let (nu_minus, nu_plus) = (2.0 * nu_minus, 2.0 * nu_plus);
    let eps = conditional_determinant(inv)?;
    let f = |x: f64| entropy_function(x, base);
    Ok(f(inv.b.max(0.0).sqrt())? - f(nu_minus)? - f(nu_plus)? + f(eps.sqrt())?)
}

/// `max(𝔇_A, 𝔇_B)`.
pub fn symmetrized_discord(r: &ReducedCM, base: LogBase) -> Result<f64> {
    let da = gaussian_discord_directional(r, Direction::A, base)?;
    let db = gaussian_discord_directional(r, Direction::B, base)?;
    Ok(da.max(db))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub e_n: f64,
    pub discord_a: f64,
    pub discord_b: f64,
    pub discord_sym: f64,
}

/// All measures for one pair; discords are clamped at zero.
pub fn correlations(r: &ReducedCM, base: LogBase) -> Result<CorrelationResult> {
    let e_n = log_negativity(r)?;
    let discord_a = gaussian_discord_directional(r, Direction::A, base)?.max(0.0);
    let discord_b = gaussian_discord_directional(r, Direction::B, base)?.max(0.0);
    Ok(CorrelationResult { e_n, discord_a, discord_b, discord_sym: discord_a.max(discord_b) })
}

/// Evaluate one measure on one reduced state (discord clamped at zero).
pub fn measure_value(r: &ReducedCM, measure: Measure, base: LogBase) -> Result<f64> {
    match measure {
        Measure::Negativity => log_negativity(r),
        Measure::Discord => Ok(symmetrized_discord(r, base)?.max(0.0)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapEntry {
    Value(f64),
    /// Same mode on both axes; not a two-mode quantity.
    SelfPair,
    Failed(String),
}

impl MapEntry {
    pub fn value(&self) -> Option<f64> {
        match self {
            MapEntry::Value(v) => Some(*v),
            _ => None,
        }
    }
}

/// Site-pair map of one measure; `entries[i * N + j]` pairs site offset `i`
/// of `species_a` with site offset `j` of `species_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    pub n_sites: usize,
    pub species_a: Species,
    pub species_b: Species,
    pub measure: Measure,
    pub entries: Vec<MapEntry>,
}

impl CorrelationMap {
    pub fn get(&self, i: usize, j: usize) -> &MapEntry {
        &self.entries[i * self.n_sites + j]
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().filter_map(MapEntry::value)
    }
}

pub fn correlation_map(
    v: &CovarianceMatrix,
    species_a: Species,
    species_b: Species,
    measure: Measure,
    base: LogBase,
) -> CorrelationMap {
    correlation_map_with(Execution::default(), v, species_a, species_b, measure, base)
}

pub fn correlation_map_with(
    execution: Execution,
    v: &CovarianceMatrix,
    species_a: Species,
    species_b: Species,
    measure: Measure,
    base: LogBase,
) -> CorrelationMap {
    let n = v.n_sites;
    let rows: Vec<usize> = (0..n).collect();
    let per_row = exec::map_indexed(execution, &rows, |&i| {
        (0..n)
            .map(|j| {
                let m1 = ModeRef::new(SiteIndex::from_offset(i, n), species_a);
                let m2 = ModeRef::new(SiteIndex::from_offset(j, n), species_b);
                if m1 == m2 {
                    return MapEntry::SelfPair;
                }
                match reduce(v, m1, m2).and_then(|r| measure_value(&r, measure, base)) {
                    Ok(x) => MapEntry::Value(x),
                    Err(e) => MapEntry::Failed(e.to_string()),
                }
            })
            .collect::<Vec<_>>()
    });
    CorrelationMap {
        n_sites: n,
        species_a,
        species_b,
        measure,
        entries: per_row.into_iter().flatten().collect(),
    }
}

//! CSV emission. Floats carry 17 significant digits so files round-trip
//! bit-exactly; records end in LF.

use std::path::Path;

use crate::correlations::{CorrelationMap, MapEntry, Measure, ModeRef, Species};
use crate::error::{Error, Result};
use crate::meanfield::BranchNote;
use crate::model::SiteIndex;
use crate::network::StabilityCell;
use crate::steadystate::CovarianceMatrix;
use crate::sweep::{Axis, ResultRecord};

pub const SWEEP_HEADER: [&str; 13] = [
    "axis",
    "axis_value",
    "site_a",
    "species_a",
    "site_b",
    "species_b",
    "measure",
    "value",
    "stable",
    "spectral_abscissa",
    "stability_tolerance",
    "branch_note",
    "error",
];

pub const CORR_MAP_HEADER: [&str; 6] = ["site_i", "site_j", "species_a", "species_b", "measure", "value"];

pub const STABILITY_HEADER: [&str; 4] = ["detuning", "drive", "spectral_abscissa", "stable"];

/// `{:.16e}`: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = writer(path)?;
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(wrap)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    write_rows(
        path,
        &SWEEP_HEADER,
        records.iter().map(|r| {
            vec![
                r.axis.as_str().to_string(),
                fmt_f64(r.axis_value),
                r.pair.0.site.label().to_string(),
                r.pair.0.species.as_str().to_string(),
                r.pair.1.site.label().to_string(),
                r.pair.1.species.as_str().to_string(),
                r.measure.as_str().to_string(),
                r.value.map(fmt_f64).unwrap_or_default(),
                r.stable.to_string(),
                fmt_f64(r.spectral_abscissa),
                fmt_f64(r.stability_tolerance),
                r.branch_note.map(|b| b.as_str().to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

fn parse<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Config(format!("cannot parse {what} from {field:?}")))
}

/// Read a file produced by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(wrap)?;
    let header = r.headers().map_err(wrap)?.clone();
    if header.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(Error::Config(format!("{}: unexpected header {:?}", path.display(), header)));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(wrap)?;
        let site = |label: &str| -> Result<SiteIndex> {
            // Site range is not known here; labels are taken as written.
            let j: i64 = parse(label, "site")?;
            SiteIndex::new(j, 2 * j.unsigned_abs() as usize + 1)
        };
        let axis: Axis = row[0].parse()?;
        let species_a: Species = row[3].parse()?;
        let species_b: Species = row[5].parse()?;
        let measure: Measure = row[6].parse()?;
        let branch_note = match &row[11] {
            "" => None,
            "unique" => Some(BranchNote::Unique),
            "multistable_lowest" => Some(BranchNote::MultistableLowest),
            other => return Err(Error::Config(format!("unknown branch note {other:?}"))),
        };
        out.push(ResultRecord {
            axis,
            axis_value: parse(&row[1], "axis_value")?,
            pair: (ModeRef::new(site(&row[2])?, species_a), ModeRef::new(site(&row[4])?, species_b)),
            measure,
            value: if row[7].is_empty() { None } else { Some(parse(&row[7], "value")?) },
            stable: parse(&row[8], "stable")?,
            spectral_abscissa: parse(&row[9], "spectral_abscissa")?,
            stability_tolerance: parse(&row[10], "stability_tolerance")?,
            branch_note,
            error: if row[12].is_empty() { None } else { Some(row[12].to_string()) },
        });
    }
    Ok(out)
}

/// One row per site pair. Same-mode diagonal entries and failed entries are
/// written as `NaN`.
pub fn write_corr_map(map: &CorrelationMap, path: &Path) -> Result<()> {
    let n = map.n_sites;
    write_rows(
        path,
        &CORR_MAP_HEADER,
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| {
            let value = match map.get(i, j) {
                MapEntry::Value(v) => fmt_f64(*v),
                MapEntry::SelfPair | MapEntry::Failed(_) => "NaN".to_string(),
            };
            vec![
                SiteIndex::from_offset(i, n).label().to_string(),
                SiteIndex::from_offset(j, n).label().to_string(),
                map.species_a.as_str().to_string(),
                map.species_b.as_str().to_string(),
                map.measure.as_str().to_string(),
                value,
            ]
        }),
    )
}

pub fn write_stability_map(cells: &[StabilityCell], path: &Path) -> Result<()> {
    write_rows(
        path,
        &STABILITY_HEADER,
        cells.iter().map(|c| {
            vec![
                fmt_f64(c.detuning),
                fmt_f64(c.drive),
                fmt_f64(c.spectral_abscissa()),
                c.stable().to_string(),
            ]
        }),
    )
}

/// Quadrature labels `X_j, Y_j, x_j, y_j` for every site.
pub fn quadrature_labels(n_sites: usize) -> Vec<String> {
    (0..n_sites)
        .flat_map(|o| {
            let j = SiteIndex::from_offset(o, n_sites).label();
            ["X", "Y", "x", "y"].map(|q| format!("{q}_{j}"))
        })
        .collect()
}

/// Full covariance, row-major, with the quadrature ordering as header.
pub fn write_covariance(v: &CovarianceMatrix, path: &Path) -> Result<()> {
    let labels = quadrature_labels(v.n_sites);
    let header: Vec<&str> = labels.iter().map(String::as_str).collect();
    let n = v.dim();
    write_rows(path, &header, (0..n).map(|i| (0..n).map(move |j| fmt_f64(v.matrix[(i, j)]))))
}

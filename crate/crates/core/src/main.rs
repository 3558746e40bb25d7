use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use omcorr::config::{ConfigFile, Grid, Range};
use omcorr::correlations::{correlation_map_with, LogBase, Measure, Species};
use omcorr::exec::Execution;
use omcorr::model::{temperature_from_occupation, thermal_occupation, Boundary, LatticeParams};
use omcorr::network::stability_map_with;
use omcorr::sweep::run_sweep_with;
use omcorr::{output, pipeline, Error, Result};

#[derive(Parser)]
#[command(name = "omcorr", version, about = "Steady-state correlations in driven optomechanical arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one parameter point and print the mean fields and stability.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Write the steady-state covariance matrix to this CSV.
        #[arg(long)]
        dump_cov: Option<PathBuf>,
    },
    /// Stability over a detuning × drive grid.
    StabilityMap {
        #[command(flatten)]
        common: Common,
        /// Detuning grid as start:stop:count.
        #[arg(long, value_parser = parse_range)]
        detuning_range: Option<Range>,
        /// Drive grid as start:stop:count.
        #[arg(long, value_parser = parse_range)]
        drive_range: Option<Range>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Site-by-site correlation map for one species pair.
    CorrMap {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        species_a: Option<Species>,
        #[arg(long)]
        species_b: Option<Species>,
        #[arg(long)]
        measure: Option<Measure>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// One-dimensional sweep described by the [sweep] section.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Convert between temperature and thermal phonon occupancy.
    ThermalConvert {
        /// Mechanical frequency ω_m/2π in Hz.
        #[arg(long, default_value_t = omcorr::config::DEFAULT_MECHANICAL_HZ)]
        frequency_hz: f64,
        #[arg(long, conflicts_with = "occupancy", required_unless_present = "occupancy")]
        temperature: Option<f64>,
        #[arg(long)]
        occupancy: Option<f64>,
    },
}

/// Config file plus per-field overrides. Overrides are read in the config's
/// units.
#[derive(Args)]
struct Common {
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    detuning: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    omega_m: Option<f64>,
    #[arg(long)]
    g0: Option<f64>,
    #[arg(long)]
    hop_optical: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hop_mechanical: Option<f64>,
    #[arg(long)]
    drive: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    drive_phase: Option<f64>,
    #[arg(long)]
    nbar_m: Option<f64>,
    #[arg(long, value_parser = parse_boundary)]
    boundary: Option<Boundary>,
    #[arg(long)]
    allow_even_sites: bool,
    #[arg(long)]
    log_base: Option<LogBase>,
    /// Evaluate on one thread.
    #[arg(long)]
    sequential: bool,
}

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:stop:count".into());
    }
    let f = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(Range {
        start: f(parts[0])?,
        stop: f(parts[1])?,
        count: parts[2].trim().parse().map_err(|e| format!("{:?}: {e}", parts[2]))?,
    })
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    match s {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        other => Err(format!("unknown boundary {other:?}")),
    }
}

impl Common {
    fn load(&self) -> Result<ConfigFile> {
        let mut cfg = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let l = &mut cfg.lattice;
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { l.$f = Some(v); } )* };
        }
        set!(n_sites, detuning, kappa, gamma, omega_m, g0, hop_optical, hop_mechanical, drive, drive_phase, nbar_m, boundary);
        if self.allow_even_sites {
            l.allow_even_sites = Some(true);
        }
        if let Some(b) = self.log_base {
            cfg.log_base = Some(b);
        }
        Ok(cfg)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn params(cfg: &ConfigFile) -> Result<LatticeParams> {
    let p = cfg.lattice_params()?;
    p.validate()?;
    Ok(p)
}

fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    match cli.command {
        Command::Solve { common, dump_cov } => {
            let cfg = common.load()?;
            let p = params(&cfg)?;
            let state = pipeline::evaluate(&p)?;
            let mf = &state.mean_fields;
            println!("alpha = {} {:+}i", mf.alpha.re, mf.alpha.im);
            println!("beta = {} {:+}i", mf.beta.re, mf.beta.im);
            println!("photon_number = {}", mf.photon_number);
            println!("branch_note = {}", mf.branch_note);
            println!("spectral_abscissa = {}", state.stability.spectral_abscissa);
            println!("stable = {}", state.stability.stable);
            if let Some(path) = dump_cov {
                let v = state.covariance.as_ref().ok_or(Error::NoSteadyState {
                    abscissa: state.stability.spectral_abscissa,
                    tolerance: state.stability.tolerance,
                })?;
                output::write_covariance(v, &path)?;
                eprintln!("wrote {}", path.display());
            }
        }
        Command::StabilityMap { common, detuning_range, drive_range, out } => {
            let mut cfg = common.load()?;
            if detuning_range.is_some() || drive_range.is_some() {
                let section = cfg.stability_map.get_or_insert(omcorr::config::StabilityMapSection {
                    detuning: Grid::List(vec![]),
                    drive: Grid::List(vec![]),
                });
                if let Some(r) = detuning_range {
                    section.detuning = Grid::Range(r);
                }
                if let Some(r) = drive_range {
                    section.drive = Grid::Range(r);
                }
            }
            let p = params(&cfg)?;
            let (detunings, drives) = cfg.stability_grids()?;
            if detunings.is_empty() || drives.is_empty() {
                return Err(Error::Config("stability map needs detuning and drive grids".into()));
            }
            eprintln!("stability map: {} x {} points, N = {}", detunings.len(), drives.len(), p.n_sites);
            let cells = stability_map_with(common.execution(), &p, &detunings, &drives);
            output::write_stability_map(&cells, &out)?;
            eprintln!("wrote {} ({:.1} s)", out.display(), started.elapsed().as_secs_f64());
        }
        Command::CorrMap { common, species_a, species_b, measure, out } => {
            let cfg = common.load()?;
            let p = params(&cfg)?;
            let section = cfg.corr_map.as_ref();
            let pick = |flag: Option<Species>, from: Option<Species>| {
                flag.or(from).ok_or_else(|| Error::Config("corr-map needs species_a and species_b".into()))
            };
            let species_a = pick(species_a, section.map(|s| s.species_a))?;
            let species_b = pick(species_b, section.map(|s| s.species_b))?;
            let measure = match (measure, section) {
                (Some(m), _) => m,
                (None, Some(s)) => s.measure.parse()?,
                (None, None) => return Err(Error::Config("corr-map needs a measure".into())),
            };
            eprintln!("solving N = {} ...", p.n_sites);
            let state = pipeline::evaluate(&p)?;
            let v = state.covariance.as_ref().ok_or(Error::NoSteadyState {
                abscissa: state.stability.spectral_abscissa,
                tolerance: state.stability.tolerance,
            })?;
            let map = correlation_map_with(common.execution(), v, species_a, species_b, measure, cfg.log_base());
            output::write_corr_map(&map, &out)?;
            eprintln!("wrote {} ({:.1} s)", out.display(), started.elapsed().as_secs_f64());
        }
        Command::Sweep { common, out } => {
            let cfg = common.load()?;
            let p = params(&cfg)?;
            let spec = cfg.sweep_spec(p)?;
            eprintln!("sweep over {} with {} values", spec.axis.as_str(), spec.values.len());
            let records = run_sweep_with(common.execution(), &spec)?;
            output::write_csv(&records, &out)?;
            eprintln!("wrote {} records to {} ({:.1} s)", records.len(), out.display(), started.elapsed().as_secs_f64());
        }
        Command::ThermalConvert { frequency_hz, temperature, occupancy } => {
            let omega = 2.0 * std::f64::consts::PI * frequency_hz;
            match (temperature, occupancy) {
                (Some(t), _) => println!("nbar_m = {}", thermal_occupation(omega, t)?),
                (None, Some(n)) => println!("temperature_k = {}", temperature_from_occupation(omega, n)?),
                (None, None) => unreachable!("clap requires one of the two"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

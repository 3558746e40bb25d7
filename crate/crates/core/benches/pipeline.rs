use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use omcorr::correlations::{correlation_map_with, LogBase, Measure, Species};
use omcorr::exec::Execution;
use omcorr::model::LatticeParams;
use omcorr::network::stability_map_with;
use omcorr::pipeline::evaluate;
use omcorr::sweep::{run_sweep_with, Axis, PairSelection, SweepSpec};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn stability(c: &mut Criterion) {
    let base = LatticeParams::default();
    let detunings: Vec<f64> = (0..20).map(|i| -3.0 + 0.3 * i as f64).collect();
    let drives: Vec<f64> = (0..20).map(|i| 10.0 + 25.0 * i as f64).collect();
    let mut g = c.benchmark_group("stability_map_20x20_n101");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| stability_map_with(mode, black_box(&base), &detunings, &drives))
        });
    }
    g.finish();
}

fn corr_map(c: &mut Criterion) {
    let state = evaluate(&LatticeParams::default()).unwrap();
    let v = state.covariance.unwrap();
    let mut g = c.benchmark_group("discord_map_n101");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| correlation_map_with(mode, black_box(&v), Species::Photon, Species::Phonon, Measure::Discord, LogBase::Ten))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        base: LatticeParams { n_sites: 21, ..Default::default() },
        axis: Axis::Thermal,
        values: vec![0.0, 0.1, 0.5, 2.5, 12.5, 25.0],
        pairs: PairSelection::AllPairs(Species::Photon, Species::Phonon),
        measures: vec![Measure::Negativity, Measure::Discord],
        log_base: LogBase::Ten,
    };
    let mut g = c.benchmark_group("thermal_sweep_n21");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_sweep_with(mode, black_box(&spec)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, stability, corr_map, sweep);
criterion_main!(benches);

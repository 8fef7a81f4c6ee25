use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qfridge::lindblad::{build_liouvillian, steady_state_numeric, BranchDrive};
use qfridge::oracle::monte_carlo_thermal_flux;
use qfridge::sweep::{run_sweep, Grid, SweepSpec};
use qfridge::{Execution, RefrigeratorParams};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn sweep(c: &mut Criterion) {
    let spec = SweepSpec::four_statistics(
        RefrigeratorParams::default(),
        Grid::logarithmic(0.1, 100.0, 30).unwrap(),
    );
    let mut g = c.benchmark_group("sweep_four_statistics");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_sweep(black_box(&spec), exec).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let p = RefrigeratorParams::default();
    let mut g = c.benchmark_group("monte_carlo_thermal");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| monte_carlo_thermal_flux(&p, 10.0, 1 << 20, 0, exec).unwrap())
        });
    }
    g.finish();
}

fn null_space_grid(c: &mut Criterion) {
    let p = RefrigeratorParams::default();
    let drives: Vec<f64> = Grid::logarithmic(0.01, 100.0, 256).unwrap().values();
    let mut g = c.benchmark_group("null_space_grid");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&drives, |&n| {
                    let d = BranchDrive::photons(n).unwrap();
                    steady_state_numeric(&build_liouvillian(&p, &d)).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, monte_carlo, null_space_grid);
criterion_main!(benches);

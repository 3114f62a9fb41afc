use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use morphsim_core::harness::{run, RunOptions, Scenario, SimConfig};
use morphsim_core::hydromath::{sweep_fin_station, sweep_fin_station_seq};
use morphsim_core::par;

fn fin_sweep(c: &mut Criterion) {
    let cfg = SimConfig::builtin();
    let p = &cfg.plant;
    let mut g = c.benchmark_group("fin_station_sweep");
    for n in [1_000usize, 20_000] {
        let stations: Vec<f64> = (0..n).map(|k| -0.3 + 1.1 * k as f64 / n as f64).collect();
        g.bench_with_input(BenchmarkId::new("parallel", n), &stations, |b, s| {
            b.iter(|| sweep_fin_station(&p.hydro, &p.rudder, &p.fin, black_box(s), 1.5))
        });
        g.bench_with_input(BenchmarkId::new("sequential", n), &stations, |b, s| {
            b.iter(|| sweep_fin_station_seq(&p.hydro, &p.rudder, &p.fin, black_box(s), 1.5))
        });
    }
    g.finish();
}

fn scenario_batch(c: &mut Criterion) {
    let variants: Vec<Scenario> = (0..8)
        .map(|k| {
            let mut s = Scenario::builtin("zigzag").expect("builtin scenario");
            s.seed = k;
            s.duration = 60.0;
            s
        })
        .collect();
    let one = |s: &Scenario| run(s, RunOptions::default()).expect("run").rows.len();
    let mut g = c.benchmark_group("scenario_batch_8x60s");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| par::map(black_box(&variants), one)));
    g.bench_function("sequential", |b| b.iter(|| par::map_seq(black_box(&variants), one)));
    g.finish();
}

criterion_group!(benches, fin_sweep, scenario_batch);
criterion_main!(benches);

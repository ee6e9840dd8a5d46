use std::hint::black_box;

use aerosim_core::atmosphere::AtmosphereModel;
use aerosim_core::config::preset;
use aerosim_core::dynamics::{rk4_step, vehicle_derivatives, VehicleSpec, STANDARD_GRAVITY};
use aerosim_core::engagement::{plan_engagement, simulate_engagement, simulate_vehicle_run};
use aerosim_core::interceptor::{kill_probability, KillTable};
use aerosim_core::{monte_carlo_batch, run_stream, InterceptorType, VehicleState};
use criterion::{criterion_group, criterion_main, Criterion};

fn step(c: &mut Criterion) {
    let spec = VehicleSpec::default();
    let env = AtmosphereModel::default();
    let s = VehicleState::reference_entry();
    c.bench_function("rk4_step vehicle", |b| {
        b.iter(|| {
            rk4_step(
                |st| vehicle_derivatives(st, 1.0, &spec, &env, STANDARD_GRAVITY),
                black_box(&s),
                0.02,
            )
        })
    });
}

fn flights(c: &mut Criterion) {
    let s = preset("x615").unwrap().noise_free();
    c.bench_function("vehicle run 615 km", |b| {
        b.iter(|| simulate_vehicle_run(black_box(&s), &mut run_stream(0, 0), 0).unwrap())
    });

    let e = preset("evasion").unwrap();
    let plan = plan_engagement(&e).unwrap();
    c.bench_function("engagement run", |b| {
        b.iter(|| {
            simulate_engagement(black_box(&e), &plan, &mut run_stream(1, 0), 0, false).unwrap()
        })
    });
}

fn batch(c: &mut Criterion) {
    let mut s = preset("calibration").unwrap();
    s.batch.runs = 32;
    let mut g = c.benchmark_group("batch");
    g.sample_size(10);
    g.bench_function("32 noisy vehicle runs", |b| {
        b.iter(|| monte_carlo_batch(black_box(&s)).unwrap())
    });
    g.finish();
}

fn tables(c: &mut Criterion) {
    let t = KillTable::for_type(InterceptorType::Type1);
    c.bench_function("kill_probability", |b| {
        b.iter(|| kill_probability(&t, black_box(9000.0), black_box(7000.0), black_box(1650.0)))
    });
}

criterion_group!(benches, step, flights, batch, tables);
criterion_main!(benches);

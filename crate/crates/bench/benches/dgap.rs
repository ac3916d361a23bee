use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use dgap_core::analysis::{find_zeros, jacobian_f};
use dgap_core::dynamics::{dgap_step, run_dgap, StepSchedule};
use dgap_core::game::{BoundingBox, GameSpec};
use dgap_core::{eigen_spectrum, ActionProfile, DgapConfig, SquareMatrix};
use std::hint::black_box;

fn dgap(c: &mut Criterion) {
    let g = GameSpec::named("diamond_search_k3").unwrap().build().unwrap();
    let x = [1.2, 0.8, 2.0];
    c.bench_function("dgap_step/diamond_k3", |b| {
        b.iter(|| {
            dgap_step(
                g.as_ref(),
                &StepSchedule::Harmonic,
                1_000,
                black_box(&x),
                &[1.0, -1.0, 1.0],
            )
            .unwrap()
        })
    });
    let x0 = ActionProfile::new(x.to_vec()).unwrap();
    let cfg = DgapConfig::new(100_000, 1).with_start_index(10);
    c.bench_function("run_dgap/diamond_k3_1e5", |b| {
        b.iter(|| run_dgap(g.as_ref(), black_box(&x0), &cfg, 1_000).unwrap())
    });
}

fn spectra(c: &mut Criterion) {
    let e1 = GameSpec::named("appendix_example_1").unwrap().build().unwrap();
    let jac = jacobian_f(e1.as_ref(), &[0.3, 0.4, 0.2, 0.5]).unwrap();
    c.bench_function("eigen_spectrum/jacobian_4", |b| {
        b.iter(|| eigen_spectrum(black_box(&jac)).unwrap())
    });
    let dense = SquareMatrix::from_fn(12, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
    c.bench_function("eigen_spectrum/dense_12", |b| {
        b.iter_batched(|| dense.clone(), |m| eigen_spectrum(&m).unwrap(), BatchSize::SmallInput)
    });
}

fn zeros(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_zeros");
    group.sample_size(10);
    for name in ["diamond_search_k3", "appendix_example_1"] {
        let g = GameSpec::named(name).unwrap().build().unwrap();
        let bounds = BoundingBox::default_for(g.n_players());
        group.bench_function(name, |b| b.iter(|| find_zeros(g.as_ref(), &bounds, 4).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, dgap, spectra, zeros);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ocsort::association::lap;
use ocsort::kalman::{FilterConfig, FilterState, Observation};
use ocsort::noise::{generate_scene, throughput_plan};
use ocsort::tracker::run_sequence;
use ocsort::TrackerConfig;

fn tracker(c: &mut Criterion) {
    let scene = generate_scene(&throughput_plan(1000, 20, 11)).unwrap();
    let mut group = c.benchmark_group("tracker");
    group.throughput(Throughput::Elements(u64::from(scene.frames)));
    for (name, config) in [
        ("oc_sort", TrackerConfig::default()),
        ("sort", TrackerConfig::sort_baseline()),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| run_sequence(black_box(config), black_box(&scene.detections), 1, scene.frames).unwrap())
        });
    }
    group.finish();
}

fn assignment(c: &mut Criterion) {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for n in [10usize, 50, 200] {
        let costs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect())
            .collect();
        c.bench_function(&format!("lap_{n}x{n}"), |b| b.iter(|| lap::solve(black_box(&costs))));
    }
}

fn kalman(c: &mut Criterion) {
    let z = Observation {
        u: 300.0,
        v: 200.0,
        s: 4000.0,
        r: 0.5,
    };
    let f = FilterState::new(&z, &FilterConfig::default());
    c.bench_function("kalman_predict_update", |b| {
        b.iter(|| black_box(f).predict().update(black_box(&z)).unwrap())
    });
}

criterion_group!(benches, tracker, assignment, kalman);
criterion_main!(benches);

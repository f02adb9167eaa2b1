use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use specmap_bench::default_record;
use specmap_core::pipeline::{layer_variogram, reconstruct_record, Method};
use specmap_core::propagation::{compute_ground_truth, count_wall_crossings};
use specmap_core::reconstruct::{idw_reconstruct, kriging_reconstruct, SampleList};
use specmap_core::scene::generate_scene;
use specmap_core::{Cell, ExperimentConfig, GridSpec};

fn propagation(c: &mut Criterion) {
    let config = ExperimentConfig::default();
    let scene = generate_scene(&config.scene, 11).unwrap();
    let mut g = c.benchmark_group("propagation");
    g.bench_function("ground_truth_64x64", |b| {
        b.iter(|| compute_ground_truth(black_box(&scene), &config.propagation, 11).unwrap())
    });
    g.bench_function("wall_crossings_diagonal", |b| {
        b.iter(|| count_wall_crossings(scene.buildings(), black_box(Cell::new(0, 3)), Cell::new(63, 60)))
    });
    g.finish();
}

fn reconstruction(c: &mut Criterion) {
    let grid = GridSpec::new(256.0, 64).unwrap();
    let mut g = c.benchmark_group("reconstruction");
    g.sample_size(10);
    for density in [0.05, 0.2] {
        let record = default_record(density, 3);
        let samples = SampleList::from_layer(record.incomplete.layer(0), &record.semantics.sampling).unwrap();
        let (model, _) = layer_variogram(&samples, &grid).unwrap();
        g.bench_function(format!("idw_layer_{density}"), |b| {
            b.iter(|| idw_reconstruct(black_box(&samples), &grid, 2.0).unwrap())
        });
        g.bench_function(format!("variogram_fit_{density}"), |b| {
            b.iter(|| layer_variogram(black_box(&samples), &grid).unwrap())
        });
        g.bench_function(format!("kriging_layer_{density}"), |b| {
            b.iter(|| kriging_reconstruct(black_box(&samples), &grid, &model, 32).unwrap())
        });
        g.bench_function(format!("kriging_record_{density}"), |b| {
            b.iter(|| reconstruct_record(black_box(&record), 256.0, Method::Kriging { neighborhood: 32 }).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, propagation, reconstruction);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use sgdpaths::dataset::deskew;
use sgdpaths::decaysim::{decay_step, zipf_weights, DecayState};
use sgdpaths::equivalence::distance_matrix;
use sgdpaths::mds::{classical_mds, smacof, DEFAULT_SMACOF_TOL};
use sgdpaths::mlp::{forward, grad, LossKind};
use sgdpaths::numeric::{sym_eig, CumulativeSampler, RngStream};

use sgdpaths_bench::{mnist_shaped_params, noisy_digit_image, random_symmetric, tau_snapshots};

fn bench_mlp(c: &mut Criterion) {
    let (params, input) = mnist_shaped_params(1);
    c.bench_function("mlp_forward_784x100x10", |b| {
        b.iter(|| forward(black_box(&params), black_box(&input)).unwrap())
    });
    c.bench_function("mlp_grad_784x100x10", |b| {
        b.iter(|| grad(black_box(&params), black_box(&input), 3, LossKind::SquaredError).unwrap())
    });
}

fn bench_eig_and_mds(c: &mut Criterion) {
    let m = random_symmetric(60, 2);
    c.bench_function("sym_eig_60", |b| {
        b.iter(|| sym_eig(black_box(&m), 60).unwrap())
    });

    let snapshots = tau_snapshots(60, 500, 3);
    let d = distance_matrix(&snapshots).unwrap();
    c.bench_function("classical_mds_60", |b| {
        b.iter(|| classical_mds(black_box(&d), 2).unwrap())
    });
    let init = classical_mds(&d, 2).unwrap();
    c.bench_function("smacof_60_50iters", |b| {
        b.iter(|| smacof(black_box(&d), black_box(&init), 50, DEFAULT_SMACOF_TOL).unwrap())
    });
    c.bench_function("distance_matrix_60x500", |b| {
        b.iter(|| distance_matrix(black_box(&snapshots)).unwrap())
    });
}

fn bench_decay(c: &mut Criterion) {
    let weights = zipf_weights(1000);
    let sampler = CumulativeSampler::new(&weights).unwrap();
    c.bench_function("decay_10k_steps_zipf_d1000", |b| {
        b.iter(|| {
            let mut rng = RngStream::new(4);
            let mut state = DecayState {
                step: 0,
                replicas: vec![vec![1.0; 1000]],
            };
            for _ in 0..10_000 {
                decay_step(&mut state, &mut rng, 0.9, &sampler);
            }
            state
        })
    });
}

fn bench_deskew(c: &mut Criterion) {
    let img = noisy_digit_image(5);
    c.bench_function("deskew_28x28", |b| b.iter(|| deskew(black_box(&img))));
}

criterion_group!(benches, bench_mlp, bench_eig_and_mds, bench_decay, bench_deskew);
criterion_main!(benches);

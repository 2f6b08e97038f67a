//! Shared fixture builders for the benchmark suite.

use sgdpaths::equivalence::{SnapshotId, SnapshotVector};
use sgdpaths::numeric::{DenseMatrix, RngStream};
use sgdpaths::MlpParams;

pub fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed);
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.uniform_in(-1.0, 1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

pub fn mnist_shaped_params(seed: u64) -> (MlpParams, Vec<f64>) {
    let mut rng = RngStream::new(seed);
    let params = sgdpaths::init_params(&mut rng, 784, 100, 10);
    let input: Vec<f64> = (0..784).map(|_| rng.uniform()).collect();
    (params, input)
}

pub fn tau_snapshots(count: usize, length: usize, seed: u64) -> Vec<(SnapshotId, SnapshotVector)> {
    let mut rng = RngStream::new(seed);
    (0..count)
        .map(|i| {
            let values: Vec<f64> = (0..length).map(|_| rng.uniform()).collect();
            (
                SnapshotId::new((i / 10) as u32, (i % 10) as u64),
                SnapshotVector::Real(values),
            )
        })
        .collect()
}

pub fn noisy_digit_image(seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed);
    let mut img = vec![0.0; 784];
    for r in 4..24 {
        for c in 10..16 {
            let shifted = c + (r as f64 * 0.2) as usize;
            if shifted < 28 {
                img[r * 28 + shifted] = 0.5 + 0.5 * rng.uniform();
            }
        }
    }
    img
}

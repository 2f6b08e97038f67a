//! Multidimensional scaling: classical (Torgerson) MDS via double
//! centering plus the symmetric eigensolver, and SMACOF stress
//! majorization for refinement.

use crate::equivalence::{DistanceMatrix, SnapshotId};
use crate::error::{Error, Result};
use crate::numeric::{sym_eig, DenseMatrix};

/// SMACOF termination: relative stress decrease below this stops early.
pub const DEFAULT_SMACOF_TOL: f64 = 1e-9;
/// SMACOF iteration budget used by the default pipeline.
pub const DEFAULT_SMACOF_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMethod {
    Classical,
    Smacof,
}

impl MdsMethod {
    pub fn name(&self) -> &'static str {
        match self {
            MdsMethod::Classical => "classical",
            MdsMethod::Smacof => "smacof",
        }
    }
}

impl std::str::FromStr for MdsMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(MdsMethod::Classical),
            "smacof" => Ok(MdsMethod::Smacof),
            other => Err(Error::InvalidArgument(format!("unknown MDS method: {other}"))),
        }
    }
}

/// Low-dimensional coordinates for a set of snapshots. Coordinates are
/// centered on the origin. Compare embeddings by pairwise distances: the
/// configuration is only defined up to rotation, reflection, and
/// translation.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub ids: Vec<SnapshotId>,
    /// M x dims coordinates.
    pub coords: DenseMatrix,
    pub method: MdsMethod,
    /// Raw stress against the distance matrix the embedding was fit to.
    pub stress: f64,
    /// Stress after every SMACOF iteration (starting value first); empty
    /// for classical embeddings.
    pub stress_history: Vec<f64>,
    /// |sum of clamped negative eigenvalues| / sum of |eigenvalues|;
    /// nonzero when the input distances are not Euclidean-realizable.
    pub clamped_negative_mass: f64,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.coords.cols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.coords.row(i)
    }
}

fn embedded_distance(x: &DenseMatrix, i: usize, j: usize) -> f64 {
    x.row(i)
        .iter()
        .zip(x.row(j))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Raw stress: sum over pairs i<j of (D_ij - |x_i - x_j|)^2.
pub fn stress(d: &DistanceMatrix, coords: &DenseMatrix) -> Result<f64> {
    let m = d.len();
    if coords.rows() != m {
        return Err(Error::ShapeMismatch(format!(
            "{} coordinate rows for a {m}-point distance matrix",
            coords.rows()
        )));
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let diff = d.entries.get(i, j) - embedded_distance(coords, i, j);
            total += diff * diff;
        }
    }
    Ok(total)
}

/// Classical (Torgerson) MDS: double-center the squared distances,
/// eigendecompose, and scale the top eigenvectors by the square roots of
/// their eigenvalues. Negative eigenvalues are clamped to zero and
/// reported via `clamped_negative_mass`.
pub fn classical_mds(d: &DistanceMatrix, dims: usize) -> Result<Embedding> {
    let m = d.len();
    if dims < 1 || dims > m.saturating_sub(1) {
        return Err(Error::InvalidArgument(format!(
            "dims must be in 1..={} for {m} points, got {dims}",
            m.saturating_sub(1)
        )));
    }
    // B = -1/2 * J * (D o D) * J computed entrywise from row, column, and
    // grand means of the squared distances.
    let sq = |v: f64| v * v;
    let row_sums: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|j| sq(d.entries.get(i, j))).sum())
        .collect();
    let row_mean: Vec<f64> = row_sums.iter().map(|s| s / m as f64).collect();
    let grand = row_sums.iter().sum::<f64>() / (m * m) as f64;
    let b = DenseMatrix::from_fn(m, m, |i, j| {
        -0.5 * (sq(d.entries.get(i, j)) - row_mean[i] - row_mean[j] + grand)
    });

    // One full decomposition: the top `dims` pairs make the coordinates
    // and the whole spectrum feeds the clamped-mass diagnostic.
    let (all_values, vectors) = sym_eig(&b, m)?;
    let values = &all_values[..dims];
    let total_abs: f64 = all_values.iter().map(|v| v.abs()).sum();
    // fold from +0.0: an empty f64 Sum yields -0.0.
    let negative_abs: f64 = all_values
        .iter()
        .filter(|v| **v < 0.0)
        .fold(0.0, |acc, v| acc + v.abs());

    let mut coords = DenseMatrix::zeros(m, dims);
    for (c, &lambda) in values.iter().enumerate() {
        let scale = lambda.max(0.0).sqrt();
        for r in 0..m {
            coords.set(r, c, vectors.get(r, c) * scale);
        }
    }
    recenter(&mut coords);

    let stress_value = stress(d, &coords)?;
    Ok(Embedding {
        ids: d.ids.clone(),
        coords,
        method: MdsMethod::Classical,
        stress: stress_value,
        stress_history: Vec::new(),
        clamped_negative_mass: if total_abs > 0.0 {
            negative_abs / total_abs
        } else {
            0.0
        },
    })
}

/// Subtract the column means so the centroid sits at the origin.
fn recenter(coords: &mut DenseMatrix) {
    let (m, dims) = (coords.rows(), coords.cols());
    if m == 0 {
        return;
    }
    for c in 0..dims {
        let mean: f64 = (0..m).map(|r| coords.get(r, c)).sum::<f64>() / m as f64;
        for r in 0..m {
            let v = coords.get(r, c) - mean;
            coords.set(r, c, v);
        }
    }
}

/// SMACOF stress majorization from an initial configuration. Stress is
/// non-increasing across iterations; an increase beyond rounding noise is
/// reported as an error rather than returned silently.
pub fn smacof(
    d: &DistanceMatrix,
    init: &Embedding,
    max_iters: usize,
    tol: f64,
) -> Result<Embedding> {
    let m = d.len();
    if init.coords.rows() != m {
        return Err(Error::ShapeMismatch(format!(
            "initial configuration has {} rows for a {m}-point matrix",
            init.coords.rows()
        )));
    }
    let dims = init.coords.cols();
    let mut x = init.coords.clone();
    let mut history = vec![stress(d, &x)?];

    for _ in 0..max_iters {
        let prev = *history.last().expect("history non-empty");
        // Guttman transform: X <- (1/m) * B(X) * X with
        // B_ij = -d_ij/|x_i - x_j| (0 when coincident), B_ii = -sum_j B_ij.
        let mut next = DenseMatrix::zeros(m, dims);
        for i in 0..m {
            let mut diag = 0.0;
            for j in 0..m {
                if i == j {
                    continue;
                }
                let e = embedded_distance(&x, i, j);
                let ratio = if e > 0.0 { d.entries.get(i, j) / e } else { 0.0 };
                diag += ratio;
                for c in 0..dims {
                    let v = next.get(i, c) - ratio * x.get(j, c);
                    next.set(i, c, v);
                }
            }
            for c in 0..dims {
                let v = (next.get(i, c) + diag * x.get(i, c)) / m as f64;
                next.set(i, c, v);
            }
        }
        let current = stress(d, &next)?;
        if current > prev + 1e-9 * prev.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "stress increased from {prev} to {current}; majorization violated"
            )));
        }
        x = next;
        history.push(current);
        if prev <= 0.0 || (prev - current) / prev < tol {
            break;
        }
    }

    recenter(&mut x);
    let final_stress = stress(d, &x)?;
    Ok(Embedding {
        ids: d.ids.clone(),
        coords: x,
        method: MdsMethod::Smacof,
        stress: final_stress,
        stress_history: history,
        clamped_negative_mass: init.clamped_negative_mass,
    })
}

/// The default pipeline: classical MDS as initialization, SMACOF
/// refinement on top.
pub fn embed_default(d: &DistanceMatrix, dims: usize) -> Result<Embedding> {
    let init = classical_mds(d, dims)?;
    smacof(d, &init, DEFAULT_SMACOF_MAX_ITERS, DEFAULT_SMACOF_TOL)
}

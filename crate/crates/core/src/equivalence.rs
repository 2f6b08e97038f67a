//! Tau and kappa vectors over a fixed test subset, and pairwise distance
//! matrices over trajectory snapshots.
//!
//! Two parameter states that are equivalent under hidden-unit symmetry
//! produce the same tau vector, so comparing tau (or the coarser kappa)
//! sidesteps the permutation symmetries of raw weight space.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::ImageSet;
use crate::error::{Error, Result};
use crate::mlp::{forward_into, predict_class, MlpParams, Scratch};
use crate::numeric::DenseMatrix;

/// Discriminant outputs over a test subset, sample-major: sample 0's K
/// outputs, then sample 1's, and so on. Entries live in [0,1]; the
/// sigmoid keeps them strictly inside except where f64 rounding saturates.
#[derive(Debug, Clone, PartialEq)]
pub struct TauVector {
    values: Vec<f64>,
    classes: usize,
}

impl TauVector {
    pub fn new(values: Vec<f64>, classes: usize) -> Result<Self> {
        if classes == 0 || !values.len().is_multiple_of(classes) {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not form whole samples of {classes} outputs",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "tau entry {pos} is {} (outside [0,1])",
                values[pos]
            )));
        }
        Ok(Self { values, classes })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn samples(&self) -> usize {
        self.values.len() / self.classes
    }

    /// Outputs of sample `n`.
    pub fn sample(&self, n: usize) -> &[f64] {
        &self.values[n * self.classes..(n + 1) * self.classes]
    }
}

/// Predicted class per test sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaVector {
    labels: Vec<u8>,
}

impl KappaVector {
    pub fn new(labels: Vec<u8>, classes: usize) -> Result<Self> {
        if let Some(pos) = labels.iter().position(|&l| l as usize >= classes) {
            return Err(Error::InvalidArgument(format!(
                "kappa entry {pos} is {} (>= {classes} classes)",
                labels[pos]
            )));
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Discriminant values of every test sample, sample-major.
pub fn tau(p: &MlpParams, test: &ImageSet) -> Result<TauVector> {
    if test.is_empty() {
        return Err(Error::InvalidArgument("empty test subset".into()));
    }
    if test.dims() != p.input_dims() {
        return Err(Error::ShapeMismatch(format!(
            "test images have {} pixels, network expects {}",
            test.dims(),
            p.input_dims()
        )));
    }
    let k = p.classes();
    let mut values = Vec::with_capacity(test.len() * k);
    let mut scratch = Scratch::for_params(p);
    for n in 0..test.len() {
        forward_into(p, test.image(n), &mut scratch);
        values.extend_from_slice(&scratch.output);
    }
    TauVector::new(values, k)
}

/// Class predictions of every test sample; the argmax of tau per sample.
pub fn kappa(p: &MlpParams, test: &ImageSet) -> Result<KappaVector> {
    let t = tau(p, test)?;
    kappa_from_tau(&t)
}

pub fn kappa_from_tau(t: &TauVector) -> Result<KappaVector> {
    let labels = (0..t.samples())
        .map(|n| predict_class(t.sample(n)) as u8)
        .collect();
    KappaVector::new(labels, t.classes())
}

/// Euclidean distance between tau vectors.
pub fn tau_distance(u: &TauVector, v: &TauVector) -> Result<f64> {
    if u.values.len() != v.values.len() {
        return Err(Error::ShapeMismatch(format!(
            "tau vectors of length {} and {}",
            u.values.len(),
            v.values.len()
        )));
    }
    Ok(euclidean(&u.values, &v.values))
}

/// Hamming distance between kappa vectors: the count of samples classified
/// differently.
pub fn kappa_distance(u: &KappaVector, v: &KappaVector) -> Result<f64> {
    if u.labels.len() != v.labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "kappa vectors of length {} and {}",
            u.labels.len(),
            v.labels.len()
        )));
    }
    Ok(hamming(&u.labels, &v.labels))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn hamming(a: &[u8], b: &[u8]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64
}

/// Identifies one trajectory snapshot: series (run or replica) and epoch
/// (or step). Rendered as `run:epoch`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SnapshotId {
    pub run: u32,
    pub epoch: u64,
}

impl SnapshotId {
    pub fn new(run: u32, epoch: u64) -> Self {
        Self { run, epoch }
    }
}

impl fmt::Display for SnapshotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.run, self.epoch)
    }
}

impl FromStr for SnapshotId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (run, epoch) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("snapshot id `{s}` is not run:epoch")))?;
        Ok(SnapshotId {
            run: run
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad run in snapshot id `{s}`")))?,
            epoch: epoch
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad epoch in snapshot id `{s}`")))?,
        })
    }
}

/// One snapshot's payload. Real-valued snapshots (tau vectors, or raw
/// state vectors from the decay simulation) compare by Euclidean
/// distance; label snapshots compare by Hamming distance.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotVector {
    Real(Vec<f64>),
    Labels(Vec<u8>),
}

impl SnapshotVector {
    pub fn len(&self) -> usize {
        match self {
            SnapshotVector::Real(v) => v.len(),
            SnapshotVector::Labels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> &'static str {
        match self {
            SnapshotVector::Real(_) => "real",
            SnapshotVector::Labels(_) => "labels",
        }
    }

    fn distance(&self, other: &SnapshotVector) -> f64 {
        match (self, other) {
            (SnapshotVector::Real(a), SnapshotVector::Real(b)) => euclidean(a, b),
            (SnapshotVector::Labels(a), SnapshotVector::Labels(b)) => hamming(a, b),
            _ => unreachable!("mixed kinds rejected before distance computation"),
        }
    }
}

impl From<TauVector> for SnapshotVector {
    fn from(t: TauVector) -> Self {
        SnapshotVector::Real(t.values)
    }
}

impl From<KappaVector> for SnapshotVector {
    fn from(k: KappaVector) -> Self {
        SnapshotVector::Labels(k.labels)
    }
}

/// Symmetric pairwise distances over snapshots; the input to MDS.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub ids: Vec<SnapshotId>,
    pub entries: DenseMatrix,
}

impl DistanceMatrix {
    /// Validates squareness, id count, symmetry, zero diagonal, and
    /// non-negativity.
    pub fn new(ids: Vec<SnapshotId>, entries: DenseMatrix) -> Result<Self> {
        if !entries.is_square() || entries.rows() != ids.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} ids with a {}x{} matrix",
                ids.len(),
                entries.rows(),
                entries.cols()
            )));
        }
        let scale = entries.max_abs_entry().max(1.0);
        if entries.max_asymmetry() > 1e-9 * scale {
            return Err(Error::NotSymmetric {
                max_delta: entries.max_asymmetry(),
                tol: 1e-9 * scale,
            });
        }
        for i in 0..entries.rows() {
            if entries.get(i, i) != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry {i} is {} (must be 0)",
                    entries.get(i, i)
                )));
            }
        }
        if entries.as_slice().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument("negative distance entry".into()));
        }
        Ok(Self { ids, entries })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Pairwise distances over snapshots of one kind. Rows are computed in
/// parallel; entries are order-independent.
pub fn distance_matrix(snapshots: &[(SnapshotId, SnapshotVector)]) -> Result<DistanceMatrix> {
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("no snapshots".into()));
    }
    let first = &snapshots[0].1;
    for (id, v) in snapshots {
        if v.kind() != first.kind() {
            return Err(Error::InvalidArgument(format!(
                "snapshot {id} has kind {}, expected {}",
                v.kind(),
                first.kind()
            )));
        }
        if v.len() != first.len() {
            return Err(Error::ShapeMismatch(format!(
                "snapshot {id} has length {}, expected {}",
                v.len(),
                first.len()
            )));
        }
    }
    let m = snapshots.len();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        snapshots[i].1.distance(&snapshots[j].1)
                    }
                })
                .collect()
        })
        .collect();
    let mut entries = DenseMatrix::zeros(m, m);
    for (i, row) in rows.into_iter().enumerate() {
        entries.row_mut(i).copy_from_slice(&row);
    }
    // Distance functions are symmetric in exact arithmetic but the (i,j)
    // and (j,i) sums run in opposite orders; mirror the upper triangle so
    // the matrix is exactly symmetric.
    for i in 0..m {
        for j in (i + 1)..m {
            let v = entries.get(i, j);
            entries.set(j, i, v);
        }
    }
    DistanceMatrix::new(snapshots.iter().map(|(id, _)| *id).collect(), entries)
}

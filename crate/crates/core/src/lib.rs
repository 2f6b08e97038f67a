//! Trajectory analysis for SGD training of small MLPs.
//!
//! The crate trains one-hidden-layer sigmoid MLPs, identifies parameter
//! states by their discriminant outputs (tau) or class predictions
//! (kappa) on a fixed test subset, embeds trajectory snapshots in 2-D by
//! multidimensional scaling, and simulates a coordinate-decay stochastic
//! process with closed-form oracles.
//!
//! Modules:
//! - [`numeric`]: dense matrices, Jacobi eigensolver, seedable RNG streams
//! - [`dataset`]: IDX parsing, deskewing, test subsets, synthetic blobs
//! - [`mlp`]: the discriminant function, loss, exact gradient
//! - [`trainer`]: SGD epochs, snapshotting, multi-run orchestration
//! - [`equivalence`]: tau/kappa vectors and snapshot distance matrices
//! - [`mds`]: classical MDS and SMACOF refinement
//! - [`decaysim`]: the coordinate-decay model and its oracles
//!
//! Everything is deterministic given a seed: parallel paths draw from
//! derived sub-streams and never share generator state.

pub mod dataset;
pub mod decaysim;
pub mod equivalence;
pub mod error;
pub mod mds;
pub mod mlp;
pub mod numeric;
pub mod trainer;

pub use dataset::{deskew, parse_idx, synthetic_blobs, test_subset, IdxFile, ImageSet};
pub use decaysim::{
    decay_step, expected_sq, memory_ratio, run_decay, zipf_weights, DecayConfig, DecayState,
    DecaySnapshot, DecayTrajectory, SelectionLaw,
};
pub use equivalence::{
    distance_matrix, kappa, kappa_distance, tau, tau_distance, DistanceMatrix, KappaVector,
    SnapshotId, SnapshotVector, TauVector,
};
pub use error::{Error, Result};
pub use mds::{classical_mds, embed_default, smacof, stress, Embedding, MdsMethod};
pub use mlp::{forward, grad, loss, predict_class, LossKind, MlpParams};
pub use numeric::{sample_index, sym_eig, DenseMatrix, RngStream};
pub use trainer::{
    classification_error, init_params, run_experiment, sgd_epoch, train_single_run, RunRecord,
    Snapshot, TrainConfig,
};

//! Numeric substrate: dense matrices, a symmetric eigensolver, seedable
//! random streams, and categorical sampling.

mod eig;
mod matrix;
mod rng;
mod sample;

pub use eig::sym_eig;
pub use matrix::{dot, DenseMatrix};
pub use rng::RngStream;
pub use sample::{sample_index, CumulativeSampler, WEIGHT_SUM_TOLERANCE};

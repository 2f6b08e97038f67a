//! Stochastic coordinate-decay model: at each step one coordinate of each
//! replica vector, chosen uniformly or by Zipf's law, is multiplied by a
//! factor gamma < 1. Closed-form second-moment oracles and a
//! memory-retention metric come with it.
//!
//! Under uniform selection every coordinate decays at the same expected
//! rate and replicas forget their initialization quickly. Under Zipf
//! selection the tail coordinates are updated so rarely that replicas
//! stay far apart for a long time while the objective still falls by
//! orders of magnitude.

use rayon::prelude::*;

use crate::equivalence::{SnapshotId, SnapshotVector};
use crate::error::{Error, Result};
use crate::numeric::{CumulativeSampler, RngStream};

/// Which distribution picks the coordinate to decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionLaw {
    Uniform,
    Zipf,
}

impl SelectionLaw {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionLaw::Uniform => "uniform",
            SelectionLaw::Zipf => "zipf",
        }
    }

    pub fn weights(&self, dims: usize) -> Vec<f64> {
        match self {
            SelectionLaw::Uniform => vec![1.0 / dims as f64; dims],
            SelectionLaw::Zipf => zipf_weights(dims),
        }
    }
}

impl std::str::FromStr for SelectionLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SelectionLaw::Uniform),
            "zipf" => Ok(SelectionLaw::Zipf),
            other => Err(Error::InvalidArgument(format!("unknown selection law: {other}"))),
        }
    }
}

/// Configuration of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayConfig {
    pub dims: usize,
    pub replicas: usize,
    /// Decay factor in (0,1); 0.9 corresponds to epsilon = 0.1.
    pub gamma: f64,
    pub law: SelectionLaw,
    pub steps: u64,
    pub snapshot_every: u64,
    pub seed: u64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            dims: 1000,
            replicas: 5,
            gamma: 0.9,
            law: SelectionLaw::Uniform,
            steps: 50_000,
            // One "epoch" of snapshots per dims coordinate updates.
            snapshot_every: 1000,
            seed: 0,
        }
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims < 1 {
            return Err(Error::InvalidArgument("dims must be at least 1".into()));
        }
        if self.replicas < 1 {
            return Err(Error::InvalidArgument("replicas must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be in (0,1), got {}",
                self.gamma
            )));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidArgument("snapshot cadence must be at least 1".into()));
        }
        Ok(())
    }
}

/// Replica vectors at one step of the process.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayState {
    pub step: u64,
    pub replicas: Vec<Vec<f64>>,
}

impl DecayState {
    pub fn squared_norms(&self) -> Vec<f64> {
        self.replicas
            .iter()
            .map(|r| r.iter().map(|v| v * v).sum())
            .collect()
    }
}

/// Zipf selection probabilities: p_i = (1/i) / H_d for i = 1..=d.
pub fn zipf_weights(dims: usize) -> Vec<f64> {
    assert!(dims >= 1, "zipf_weights needs at least one dimension");
    let harmonic: f64 = (1..=dims).map(|i| 1.0 / i as f64).sum();
    (1..=dims).map(|i| (1.0 / i as f64) / harmonic).collect()
}

/// Advance every replica by one step: each independently picks one
/// coordinate from `sampler` and multiplies it by `gamma`.
pub fn decay_step(
    state: &mut DecayState,
    rng: &mut RngStream,
    gamma: f64,
    sampler: &CumulativeSampler,
) {
    for replica in &mut state.replicas {
        let idx = sampler.sample(rng);
        replica[idx] *= gamma;
    }
    state.step += 1;
}

/// Closed-form expected squared coordinates after `t` steps:
/// E[theta_i^2(t)] = theta0_i^2 * (1 - (1 - gamma^2) * p_i)^t.
///
/// Each step multiplies coordinate i by gamma with probability p_i, so
/// its squared value is scaled by gamma^2 with probability p_i and kept
/// otherwise; the per-step factor on the expectation is the mixture.
pub fn expected_sq(theta0: &[f64], weights: &[f64], gamma: f64, t: u64) -> Result<Vec<f64>> {
    if theta0.len() != weights.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} initial coordinates with {} weights",
            theta0.len(),
            weights.len()
        )));
    }
    Ok(theta0
        .iter()
        .zip(weights)
        .map(|(&x, &p)| x * x * powu(1.0 - (1.0 - gamma * gamma) * p, t))
        .collect())
}

/// Deterministic f64 power with integer exponent (exponentiation by
/// squaring); avoids libm powf so outputs are stable everywhere.
fn powu(base: f64, mut exp: u64) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

/// All replica vectors recorded at one snapshot step.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySnapshot {
    pub step: u64,
    pub replicas: Vec<Vec<f64>>,
}

/// Snapshots of a full simulation, step 0 first.
#[derive(Debug, Clone)]
pub struct DecayTrajectory {
    pub config: DecayConfig,
    pub snapshots: Vec<DecaySnapshot>,
}

impl DecayTrajectory {
    /// Latest snapshot at or before `step`.
    pub fn snapshot_at(&self, step: u64) -> Option<&DecaySnapshot> {
        self.snapshots.iter().rev().find(|s| s.step <= step)
    }

    /// Snapshot payloads for the equivalence/MDS pipeline: the raw vector
    /// is the snapshot, with the replica index in the run position.
    pub fn to_snapshot_vectors(&self) -> Vec<(SnapshotId, SnapshotVector)> {
        let mut out = Vec::new();
        for snap in &self.snapshots {
            for (r, replica) in snap.replicas.iter().enumerate() {
                out.push((
                    SnapshotId::new(r as u32, snap.step),
                    SnapshotVector::Real(replica.clone()),
                ));
            }
        }
        out
    }
}

/// Run the process from i.i.d. standard normal initializations. Replica
/// r draws everything from sub-stream derive(seed, r), so the trajectory
/// is deterministic and replicas can be simulated in parallel.
pub fn run_decay(cfg: &DecayConfig) -> Result<DecayTrajectory> {
    cfg.validate()?;
    let sampler = CumulativeSampler::new(&cfg.law.weights(cfg.dims))?;

    let mut recorded: Vec<u64> = (0..=cfg.steps).step_by(usize::try_from(cfg.snapshot_every).map_err(
        |_| Error::InvalidArgument("snapshot cadence too large".into()),
    )?).collect();
    if *recorded.last().expect("at least step 0") != cfg.steps {
        recorded.push(cfg.steps);
    }

    let per_replica: Vec<Vec<Vec<f64>>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::derive(cfg.seed, r as u64);
            let mut theta: Vec<f64> =
                (0..cfg.dims).map(|_| rng.standard_normal()).collect();
            let mut snaps = Vec::with_capacity(recorded.len());
            let mut next_record = 0usize;
            for step in 0..=cfg.steps {
                if recorded[next_record] == step {
                    snaps.push(theta.clone());
                    next_record += 1;
                    if next_record == recorded.len() {
                        break;
                    }
                }
                if step < cfg.steps {
                    let idx = sampler.sample(&mut rng);
                    theta[idx] *= cfg.gamma;
                }
            }
            snaps
        })
        .collect();

    let snapshots = recorded
        .iter()
        .enumerate()
        .map(|(si, &step)| DecaySnapshot {
            step,
            replicas: per_replica.iter().map(|r| r[si].clone()).collect(),
        })
        .collect();
    Ok(DecayTrajectory {
        config: cfg.clone(),
        snapshots,
    })
}

/// Mean pairwise inter-replica distance at the latest snapshot at or
/// before `t`, normalized by the same quantity at step 0.
pub fn memory_ratio(traj: &DecayTrajectory, t: u64) -> Result<f64> {
    let initial = traj
        .snapshots
        .first()
        .ok_or_else(|| Error::InvalidArgument("trajectory has no snapshots".into()))?;
    if initial.replicas.len() < 2 {
        return Err(Error::InvalidArgument(
            "memory ratio needs at least 2 replicas".into(),
        ));
    }
    let at_t = traj
        .snapshot_at(t)
        .ok_or_else(|| Error::InvalidArgument(format!("no snapshot at or before step {t}")))?;
    let base = mean_pairwise_distance(&initial.replicas);
    if base == 0.0 {
        return Err(Error::InvalidArgument(
            "replicas coincide at initialization".into(),
        ));
    }
    Ok(mean_pairwise_distance(&at_t.replicas) / base)
}

fn mean_pairwise_distance(replicas: &[Vec<f64>]) -> f64 {
    let n = replicas.len();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += replicas[i]
                .iter()
                .zip(&replicas[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            pairs += 1;
        }
    }
    total / pairs as f64
}

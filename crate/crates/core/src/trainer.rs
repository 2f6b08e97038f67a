//! SGD training loops, per-epoch snapshotting of tau/kappa/error, and
//! orchestration of many independent runs.

use rayon::prelude::*;

use crate::dataset::ImageSet;
use crate::equivalence::{kappa_from_tau, tau, KappaVector, TauVector};
use crate::error::{Error, Result};
use crate::mlp::{
    accumulate_gradient, forward_into, predict_class, Gradients, LossKind, MlpParams, Scratch,
};
use crate::numeric::{DenseMatrix, RngStream};

/// Configuration of one training experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// 1 = single-sample updates; the batched comparison uses 100.
    pub batch_size: usize,
    pub epochs: usize,
    pub hidden_units: usize,
    pub seed: u64,
    /// Epochs between snapshots.
    pub snapshot_every: usize,
    /// Whether the dataset was deskewed before training (recorded in run
    /// manifests; the trainer itself receives data already prepared).
    pub deskew: bool,
    pub loss: LossKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            batch_size: 1,
            epochs: 20,
            hidden_units: 100,
            seed: 0,
            snapshot_every: 1,
            deskew: true,
            loss: LossKind::SquaredError,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if self.hidden_units == 0 {
            return Err(Error::InvalidArgument("hidden units must be at least 1".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidArgument("snapshot cadence must be at least 1".into()));
        }
        Ok(())
    }
}

/// State captured at one snapshot epoch. Epoch 0 is the initialization.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub epoch: u64,
    pub tau: TauVector,
    pub kappa: KappaVector,
    pub train_error: f64,
    pub test_error: f64,
    /// Mean loss of the epoch that ended here; zero for epoch 0.
    pub mean_loss: f64,
}

/// Full trajectory of one training run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run_id: u32,
    pub config: TrainConfig,
    pub snapshots: Vec<Snapshot>,
}

/// Number of output classes; labels are digits.
pub const CLASSES: usize = 10;

/// Uniform initialization on [-1/sqrt(fan_in), +1/sqrt(fan_in)] per
/// weight layer; biases start at zero.
pub fn init_params(rng: &mut RngStream, input_dims: usize, hidden_units: usize, classes: usize) -> MlpParams {
    let a_bound = 1.0 / (input_dims as f64).sqrt();
    let b_bound = 1.0 / (hidden_units as f64).sqrt();
    let hidden_weights =
        DenseMatrix::from_fn(hidden_units, input_dims, |_, _| rng.uniform_in(-a_bound, a_bound));
    let output_weights =
        DenseMatrix::from_fn(classes, hidden_units, |_, _| rng.uniform_in(-b_bound, b_bound));
    MlpParams::new(
        vec![0.0; hidden_units],
        hidden_weights,
        vec![0.0; classes],
        output_weights,
    )
    .expect("initialization produces consistent shapes")
}

/// Fraction of `data` misclassified by `p`.
pub fn classification_error(p: &MlpParams, data: &ImageSet) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    if data.dims() != p.input_dims() {
        return Err(Error::ShapeMismatch(format!(
            "images have {} pixels, network expects {}",
            data.dims(),
            p.input_dims()
        )));
    }
    let mut scratch = Scratch::for_params(p);
    let mut wrong = 0usize;
    for i in 0..data.len() {
        forward_into(p, data.image(i), &mut scratch);
        if predict_class(&scratch.output) != data.label(i) as usize {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len() as f64)
}

/// One full pass over `data` in a fresh shuffle, updating `params` with
/// the mean gradient of each batch. Returns the mean per-sample loss.
pub fn sgd_epoch(
    params: &mut MlpParams,
    data: &ImageSet,
    cfg: &TrainConfig,
    rng: &mut RngStream,
) -> Result<f64> {
    sgd_epoch_impl(params, data, cfg, rng, None, 0)
}

fn sgd_epoch_impl(
    params: &mut MlpParams,
    data: &ImageSet,
    cfg: &TrainConfig,
    rng: &mut RngStream,
    run: Option<u32>,
    epoch: usize,
) -> Result<f64> {
    // A single epoch accepts the degenerate lr = 0 (null update);
    // experiment configs require lr > 0 via validate().
    if !(cfg.learning_rate.is_finite() && cfg.learning_rate >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be finite and non-negative, got {}",
            cfg.learning_rate
        )));
    }
    if cfg.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be at least 1".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    rng.shuffle(&mut order);

    let mut scratch = Scratch::for_params(params);
    let mut grads = Gradients::zeros_like(params);
    let mut total_loss = 0.0;
    for (batch_index, batch) in order.chunks(cfg.batch_size).enumerate() {
        grads.reset();
        let mut batch_loss = 0.0;
        for &i in batch {
            batch_loss += accumulate_gradient(
                params,
                data.image(i),
                data.label(i) as usize,
                cfg.loss,
                &mut scratch,
                &mut grads,
            )?;
        }
        if !batch_loss.is_finite() {
            return Err(Error::Divergence {
                run,
                epoch,
                batch: batch_index,
                what: format!("batch loss is {batch_loss}"),
            });
        }
        total_loss += batch_loss;
        // Mean gradient over the batch, so the learning rate is
        // comparable across batch sizes. A final partial batch uses its
        // own mean.
        params.gradient_step(&grads, cfg.learning_rate / batch.len() as f64);
    }
    if !params.all_finite() {
        return Err(Error::Divergence {
            run,
            epoch,
            batch: order.chunks(cfg.batch_size).count().saturating_sub(1),
            what: "non-finite parameter after epoch".into(),
        });
    }
    Ok(total_loss / data.len() as f64)
}

fn record_snapshot(
    p: &MlpParams,
    epoch: u64,
    mean_loss: f64,
    train: &ImageSet,
    test: &ImageSet,
) -> Result<Snapshot> {
    let t = tau(p, test)?;
    let k = kappa_from_tau(&t)?;
    Ok(Snapshot {
        epoch,
        tau: t,
        kappa: k,
        train_error: classification_error(p, train)?,
        test_error: classification_error(p, test)?,
        mean_loss,
    })
}

/// Train one network from sub-stream `run_id` of the experiment seed,
/// snapshotting on the configured cadence (plus epoch 0 and the final
/// epoch).
pub fn train_single_run(
    cfg: &TrainConfig,
    run_id: u32,
    train: &ImageSet,
    test: &ImageSet,
) -> Result<RunRecord> {
    cfg.validate()?;
    let mut rng = RngStream::derive(cfg.seed, run_id as u64);
    let mut params = init_params(&mut rng, train.dims(), cfg.hidden_units, CLASSES);
    let mut snapshots = vec![record_snapshot(&params, 0, 0.0, train, test)?];
    for epoch in 1..=cfg.epochs {
        let mean_loss = sgd_epoch_impl(&mut params, train, cfg, &mut rng, Some(run_id), epoch)?;
        if epoch % cfg.snapshot_every == 0 || epoch == cfg.epochs {
            snapshots.push(record_snapshot(&params, epoch as u64, mean_loss, train, test)?);
        }
    }
    Ok(RunRecord {
        run_id,
        config: cfg.clone(),
        snapshots,
    })
}

/// Train `num_runs` independent networks. Run k draws from
/// derive(seed, k), so records are identical regardless of execution
/// order or parallelism.
pub fn run_experiment(
    cfg: &TrainConfig,
    num_runs: usize,
    train: &ImageSet,
    test: &ImageSet,
) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    if num_runs == 0 {
        return Err(Error::InvalidArgument("at least one run required".into()));
    }
    if test.is_empty() {
        return Err(Error::InvalidArgument("empty test subset".into()));
    }
    (0..num_runs as u32)
        .into_par_iter()
        .map(|run_id| train_single_run(cfg, run_id, train, test))
        .collect()
}

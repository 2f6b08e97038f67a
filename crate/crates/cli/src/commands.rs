//! Subcommand implementations. Every command validates and computes
//! first, then writes all outputs at the end, so a failing invocation
//! (exit code 2 or 3) leaves no partial output directory behind.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use sgdpaths::dataset::{test_subset, ImageSet, DEFAULT_TEST_SUBSET};
use sgdpaths::decaysim::{expected_sq, run_decay, DecayConfig, SelectionLaw};
use sgdpaths::equivalence::{distance_matrix, SnapshotId, SnapshotVector};
use sgdpaths::mds::{classical_mds, smacof, MdsMethod};
use sgdpaths::mlp::LossKind;
use sgdpaths::numeric::RngStream;
use sgdpaths::trainer::{run_experiment, RunRecord, TrainConfig};
use sgdpaths::{synthetic_blobs, Error};

use crate::args::{EmbedArgs, MdsArgs, PlotArgs, SimulateArgs, TrainArgs};
use crate::io;
use crate::svg::{self, PlotSpec};
use crate::{CliError, CliResult};

const MNIST_FILES: [(&str, &str); 2] = [
    ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
];

/// Synthetic fallback dataset: ten well-separated Gaussian blobs.
const SYNTHETIC_DIMS: usize = 64;
const SYNTHETIC_CLASSES: usize = 10;
const SYNTHETIC_TRAIN_PER_CLASS: usize = 100;
const SYNTHETIC_TEST_PER_CLASS: usize = 20;
const SYNTHETIC_SEPARATION: f64 = 6.0;
// Data sub-streams sit at the top of the index space, far above run ids.
const SYNTHETIC_TRAIN_STREAM: u64 = u64::MAX - 1;
const SYNTHETIC_TEST_STREAM: u64 = u64::MAX - 2;

fn thread_pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))
}

fn load_mnist_pair(dir: &Path, images: &str, labels: &str) -> CliResult<ImageSet> {
    let image_path = dir.join(images);
    let label_path = dir.join(labels);
    for p in [&image_path, &label_path] {
        if !p.exists() {
            return Err(CliError::input(format!(
                "missing data file: {}",
                p.display()
            )));
        }
    }
    let image_bytes = io::read_bytes(&image_path)?;
    let label_bytes = io::read_bytes(&label_path)?;
    ImageSet::from_idx_bytes(
        &image_bytes,
        &label_bytes,
        image_path.display().to_string(),
    )
    .map_err(CliError::from)
}

fn load_train_data(args: &TrainArgs) -> CliResult<(ImageSet, ImageSet)> {
    if args.synthetic {
        let train = synthetic_blobs(
            SYNTHETIC_DIMS,
            SYNTHETIC_CLASSES,
            SYNTHETIC_TRAIN_PER_CLASS,
            SYNTHETIC_SEPARATION,
            &mut RngStream::derive(args.seed, SYNTHETIC_TRAIN_STREAM),
        )?;
        let test_pool = synthetic_blobs(
            SYNTHETIC_DIMS,
            SYNTHETIC_CLASSES,
            SYNTHETIC_TEST_PER_CLASS,
            SYNTHETIC_SEPARATION,
            &mut RngStream::derive(args.seed, SYNTHETIC_TEST_STREAM),
        )?;
        let n = test_pool.len().min(DEFAULT_TEST_SUBSET);
        return Ok((train, test_subset(&test_pool, n)?));
    }
    let dir = args.data_dir.as_deref().ok_or_else(|| {
        CliError::input(
            "no dataset: pass --data-dir (or set SGDPATHS_DATA_DIR) for MNIST, or --synthetic",
        )
    })?;
    let (train_images, train_labels) = MNIST_FILES[0];
    let (test_images, test_labels) = MNIST_FILES[1];
    let mut train = load_mnist_pair(dir, train_images, train_labels)?;
    let mut test_full = load_mnist_pair(dir, test_images, test_labels)?;
    if args.deskew {
        train = train.deskewed()?;
        test_full = test_full.deskewed()?;
    }
    let n = test_full.len().min(DEFAULT_TEST_SUBSET);
    Ok((train, test_subset(&test_full, n)?))
}

fn train_config(args: &TrainArgs) -> CliResult<TrainConfig> {
    let loss: LossKind = args.loss.parse()?;
    let cfg = TrainConfig {
        learning_rate: args.lr,
        batch_size: args.batch,
        epochs: args.epochs,
        hidden_units: args.hidden,
        seed: args.seed,
        snapshot_every: args.snapshot_every,
        deskew: args.deskew,
        loss,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_run_outputs(
    out: &Path,
    cfg: &TrainConfig,
    args: &TrainArgs,
    train: &ImageSet,
    records: &[RunRecord],
) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;

    let manifest: Vec<(&str, String)> = vec![
        ("seed", cfg.seed.to_string()),
        ("lr", io::fmt_f64(cfg.learning_rate)),
        ("batch", cfg.batch_size.to_string()),
        ("epochs", cfg.epochs.to_string()),
        ("hidden", cfg.hidden_units.to_string()),
        ("snapshot_every", cfg.snapshot_every.to_string()),
        ("deskew", cfg.deskew.to_string()),
        ("loss", cfg.loss.name().to_string()),
        ("runs", args.runs.to_string()),
        ("dataset", train.provenance().to_string()),
        ("dataset_checksum", io::dataset_checksum(train)),
        ("code_version", env!("CARGO_PKG_VERSION").to_string()),
    ];
    io::write_manifest(&out.join("manifest.txt"), &manifest)?;

    for record in records {
        let tau_rows: Vec<(SnapshotId, &[f64])> = record
            .snapshots
            .iter()
            .map(|s| (SnapshotId::new(record.run_id, s.epoch), s.tau.values()))
            .collect();
        io::write_real_trajectory(&out.join(format!("tau_run{:03}.csv", record.run_id)), &tau_rows)?;

        let kappa_rows: Vec<(SnapshotId, &[u8])> = record
            .snapshots
            .iter()
            .map(|s| (SnapshotId::new(record.run_id, s.epoch), s.kappa.labels()))
            .collect();
        io::write_label_trajectory(
            &out.join(format!("kappa_run{:03}.csv", record.run_id)),
            &kappa_rows,
        )?;
    }

    let errors_path = out.join("errors.csv");
    let mut lines = vec!["run,epoch,train_error,test_error,mean_loss".to_string()];
    for record in records {
        for s in &record.snapshots {
            lines.push(format!(
                "{},{},{},{},{}",
                record.run_id,
                s.epoch,
                io::fmt_f64(s.train_error),
                io::fmt_f64(s.test_error),
                io::fmt_f64(s.mean_loss),
            ));
        }
    }
    fs::write(&errors_path, lines.join("\n") + "\n")
        .map_err(|e| CliError::input(format!("{}: {e}", errors_path.display())))?;
    Ok(())
}

pub fn cmd_train(args: &TrainArgs) -> CliResult<()> {
    if args.runs == 0 {
        return Err(CliError::input("--runs must be at least 1"));
    }
    let cfg = train_config(args)?;
    let (train, test) = load_train_data(args)?;
    let pool = thread_pool(args.threads)?;
    let records = pool.install(|| run_experiment(&cfg, args.runs, &train, &test))?;
    write_run_outputs(&args.out, &cfg, args, &train, &records)?;
    println!(
        "wrote {} runs x {} snapshots to {}",
        records.len(),
        records.first().map_or(0, |r| r.snapshots.len()),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let law: SelectionLaw = args.law.parse()?;
    let cfg = DecayConfig {
        dims: args.dims,
        replicas: args.replicas,
        gamma: args.gamma,
        law,
        steps: args.steps,
        snapshot_every: args.snapshot_every.unwrap_or(args.dims.max(1) as u64),
        seed: args.seed,
    };
    cfg.validate()?;
    let pool = thread_pool(args.threads)?;
    let traj = pool.install(|| run_decay(&cfg))?;
    let weights = law.weights(cfg.dims);

    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;

    let weights_text: Vec<String> = weights.iter().map(|w| io::fmt_f64(*w)).collect();
    let manifest: Vec<(&str, String)> = vec![
        ("dims", cfg.dims.to_string()),
        ("replicas", cfg.replicas.to_string()),
        ("steps", cfg.steps.to_string()),
        ("law", law.name().to_string()),
        ("gamma", io::fmt_f64(cfg.gamma)),
        ("snapshot_every", cfg.snapshot_every.to_string()),
        ("seed", cfg.seed.to_string()),
        ("weights", weights_text.join(",")),
        ("code_version", env!("CARGO_PKG_VERSION").to_string()),
    ];
    io::write_manifest(&out.join("manifest.txt"), &manifest)?;

    let initial = &traj.snapshots[0];
    for r in 0..cfg.replicas {
        let rows: Vec<(SnapshotId, &[f64])> = traj
            .snapshots
            .iter()
            .map(|s| (SnapshotId::new(r as u32, s.step), s.replicas[r].as_slice()))
            .collect();
        io::write_real_trajectory(&out.join(format!("tau_rep{r:03}.csv")), &rows)?;
    }

    // Closed-form audit file: expected squared coordinates per replica at
    // every logged step.
    let mut expected_rows_owned: Vec<(SnapshotId, Vec<f64>)> = Vec::new();
    for r in 0..cfg.replicas {
        for s in &traj.snapshots {
            expected_rows_owned.push((
                SnapshotId::new(r as u32, s.step),
                expected_sq(&initial.replicas[r], &weights, cfg.gamma, s.step)?,
            ));
        }
    }
    let expected_rows: Vec<(SnapshotId, &[f64])> = expected_rows_owned
        .iter()
        .map(|(id, v)| (*id, v.as_slice()))
        .collect();
    io::write_real_trajectory(&out.join("expected_sq.csv"), &expected_rows)?;

    println!(
        "wrote {} replicas x {} snapshots to {}",
        cfg.replicas,
        traj.snapshots.len(),
        out.display()
    );
    Ok(())
}

pub fn cmd_embed(args: &EmbedArgs) -> CliResult<()> {
    let prefix = match args.metric.as_str() {
        "tau" => "tau_",
        "kappa" => "kappa_",
        other => {
            return Err(CliError::input(format!(
                "unknown metric `{other}` (expected tau or kappa)"
            )))
        }
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&args.runs)
        .map_err(|e| CliError::input(format!("{}: {e}", args.runs.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with(prefix) && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::input(format!(
            "no {}*.csv trajectory files in {}",
            prefix,
            args.runs.display()
        )));
    }

    let mut snapshots: Vec<(SnapshotId, SnapshotVector)> = Vec::new();
    for file in &files {
        if args.metric == "tau" {
            for (id, values) in io::read_real_trajectory(file)? {
                snapshots.push((id, SnapshotVector::Real(values)));
            }
        } else {
            for (id, values) in io::read_label_trajectory(file)? {
                snapshots.push((id, SnapshotVector::Labels(values)));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for (id, _) in &snapshots {
        if !seen.insert(*id) {
            return Err(CliError::input(format!("duplicate snapshot id {id}")));
        }
    }

    let d = distance_matrix(&snapshots)?;
    io::write_distance_csv(&args.out, &d)?;
    println!("wrote {}x{} distance matrix to {}", d.len(), d.len(), args.out.display());
    Ok(())
}

pub fn cmd_mds(args: &MdsArgs) -> CliResult<()> {
    let method: MdsMethod = args.method.parse()?;
    let d = io::read_distance_csv(&args.dist)?;
    let embedding = match method {
        MdsMethod::Classical => classical_mds(&d, args.dims)?,
        MdsMethod::Smacof => {
            let init = classical_mds(&d, args.dims)?;
            smacof(&d, &init, args.max_iters, args.tol)?
        }
    };
    io::write_coords_csv(&args.out, &embedding)?;
    println!("stress={}", io::fmt_f64(embedding.stress));
    println!(
        "clamped_negative_eigenvalue_mass={}",
        io::fmt_f64(embedding.clamped_negative_mass)
    );
    if method == MdsMethod::Smacof {
        println!("iterations={}", embedding.stress_history.len().saturating_sub(1));
    }
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs) -> CliResult<()> {
    let points = io::read_coords_csv(&args.coords)?;
    let spec = PlotSpec {
        width: args.width,
        height: args.height,
    };
    let rendered = svg::render(&points, &spec)?;
    fs::write(&args.out, rendered)
        .map_err(|e| CliError::input(format!("{}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

// Divergence errors keep their dedicated exit code through the blanket
// conversion; everything else maps to a usage/input failure.
impl From<&Error> for CliError {
    fn from(e: &Error) -> Self {
        match e {
            Error::Divergence { .. } => CliError::Divergence(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

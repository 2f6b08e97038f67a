//! End-to-end tests of the `sgdpaths` binary: flag handling, output
//! layout, exit codes, and format fidelity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sgdpaths::equivalence::{distance_matrix, SnapshotId, SnapshotVector};
use sgdpaths::numeric::RngStream;
use sgdpaths_cli::io;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgdpaths"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_dir_sorted(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn train_synthetic_smoke_produces_expected_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run(&[
        "train", "--synthetic", "--runs", "2", "--epochs", "2", "--hidden", "8",
        "--seed", "3", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let names: Vec<String> = read_dir_sorted(&out_dir)
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        vec![
            "errors.csv",
            "kappa_run000.csv",
            "kappa_run001.csv",
            "manifest.txt",
            "tau_run000.csv",
            "tau_run001.csv",
        ]
    );
    // Snapshot rows: epoch 0 plus epochs 1 and 2.
    let tau = io::read_real_trajectory(&out_dir.join("tau_run000.csv")).unwrap();
    let epochs: Vec<u64> = tau.iter().map(|(id, _)| id.epoch).collect();
    assert_eq!(epochs, vec![0, 1, 2]);
    assert!(tau.iter().all(|(id, _)| id.run == 0));

    let manifest = io::read_manifest(&out_dir.join("manifest.txt")).unwrap();
    let get = |key: &str| {
        manifest
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| panic!("missing manifest key {key}"))
    };
    assert_eq!(get("seed"), "3");
    assert_eq!(get("runs"), "2");
    assert_eq!(get("dataset"), "synthetic");
    assert!(get("dataset_checksum").starts_with("fnv1a64:"));
}

#[test]
fn train_without_data_source_fails_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("never");
    let out = bin()
        .args(["train", "--out", out_dir.to_str().unwrap()])
        .env_remove("SGDPATHS_DATA_DIR")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(!out_dir.exists(), "failed command must not create outputs");
}

#[test]
fn train_with_missing_mnist_files_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("empty-data");
    fs::create_dir(&data_dir).unwrap();
    let out_dir = dir.path().join("never");
    let out = run(&[
        "train", "--data-dir", data_dir.to_str().unwrap(),
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("train-images-idx3-ubyte"),
        "stderr should name the missing file: {stderr}"
    );
    assert!(!out_dir.exists());
}

#[test]
fn train_rejects_bad_loss_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("never");
    let out = run(&[
        "train", "--synthetic", "--loss", "hinge",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(!out_dir.exists());
}

#[test]
fn train_divergence_exits_3() {
    // Cross-entropy with an absurd learning rate saturates the outputs
    // and aborts; the process must exit 3 and write nothing.
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("never");
    let out = run(&[
        "train", "--synthetic", "--runs", "1", "--epochs", "5", "--hidden", "4",
        "--lr", "1e300", "--loss", "cross-entropy", "--seed", "29",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("divergence"), "{stderr}");
    assert!(stderr.contains("epoch"), "{stderr}");
    assert!(!out_dir.exists());
}

/// Build a tiny 28x28 IDX fixture set on disk.
fn write_idx_fixtures(dir: &Path, train_count: usize, test_count: usize) {
    let mut rng = RngStream::new(99);
    let mut write_pair = |images_name: &str, labels_name: &str, count: usize| {
        let mut image_bytes = Vec::new();
        image_bytes.extend_from_slice(&0x0000_0803u32.to_be_bytes());
        image_bytes.extend_from_slice(&(count as u32).to_be_bytes());
        image_bytes.extend_from_slice(&28u32.to_be_bytes());
        image_bytes.extend_from_slice(&28u32.to_be_bytes());
        let mut label_bytes = Vec::new();
        label_bytes.extend_from_slice(&0x0000_0801u32.to_be_bytes());
        label_bytes.extend_from_slice(&(count as u32).to_be_bytes());
        for _ in 0..count {
            for _ in 0..784 {
                image_bytes.push((rng.uniform() * 255.0) as u8);
            }
            label_bytes.push(rng.gen_index(10) as u8);
        }
        fs::write(dir.join(images_name), image_bytes).unwrap();
        fs::write(dir.join(labels_name), label_bytes).unwrap();
    };
    write_pair("train-images-idx3-ubyte", "train-labels-idx1-ubyte", train_count);
    write_pair("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte", test_count);
}

#[test]
fn train_reads_idx_files_from_data_dir_with_deskew() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    fs::create_dir(&data_dir).unwrap();
    write_idx_fixtures(&data_dir, 30, 20);
    let out_dir = dir.path().join("run");
    let out = run(&[
        "train", "--data-dir", data_dir.to_str().unwrap(),
        "--runs", "1", "--epochs", "1", "--hidden", "4", "--seed", "1",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let manifest = io::read_manifest(&out_dir.join("manifest.txt")).unwrap();
    let dataset = &manifest.iter().find(|(k, _)| k == "dataset").unwrap().1;
    assert!(dataset.contains("deskewed"), "manifest dataset: {dataset}");
    // tau columns: 20 test samples x 10 classes.
    let tau = io::read_real_trajectory(&out_dir.join("tau_run000.csv")).unwrap();
    assert_eq!(tau[0].1.len(), 200);
}

#[test]
fn train_falls_back_to_env_var_for_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    fs::create_dir(&data_dir).unwrap();
    write_idx_fixtures(&data_dir, 12, 10);
    let out_dir = dir.path().join("run");
    let out = bin()
        .args([
            "train", "--runs", "1", "--epochs", "1", "--hidden", "3",
            "--deskew", "false", "--out", out_dir.to_str().unwrap(),
        ])
        .env("SGDPATHS_DATA_DIR", &data_dir)
        .output()
        .unwrap();
    assert_success(&out);
    let manifest = io::read_manifest(&out_dir.join("manifest.txt")).unwrap();
    let deskew = &manifest.iter().find(|(k, _)| k == "deskew").unwrap().1;
    assert_eq!(deskew, "false");
}

#[test]
fn simulate_zero_steps_snapshots_equal_initialization() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sim");
    let out = run(&[
        "simulate", "--dims", "10", "--replicas", "2", "--steps", "0",
        "--seed", "11", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    for r in 0..2u64 {
        let rows =
            io::read_real_trajectory(&out_dir.join(format!("tau_rep{r:03}.csv"))).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, SnapshotId::new(r as u32, 0));
        let mut rng = RngStream::derive(11, r);
        let expected: Vec<f64> = (0..10).map(|_| rng.standard_normal()).collect();
        assert_eq!(rows[0].1, expected);
    }
}

#[test]
fn simulate_zipf_manifest_records_analytic_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sim");
    let out = run(&[
        "simulate", "--dims", "3", "--replicas", "2", "--steps", "5",
        "--law", "zipf", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let manifest = io::read_manifest(&out_dir.join("manifest.txt")).unwrap();
    let weights = &manifest.iter().find(|(k, _)| k == "weights").unwrap().1;
    let parsed: Vec<f64> = weights.split(',').map(|w| w.parse().unwrap()).collect();
    // H_3 = 11/6, so the weights are (6/11, 3/11, 2/11); the recorded
    // values match to within a unit in the last place.
    for (got, expected) in parsed.iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }
}

#[test]
fn simulate_rejects_invalid_law_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("never");
    let out = run(&[
        "simulate", "--law", "pareto", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(!out_dir.exists());
}

fn write_tau_fixture(dir: &Path, name: &str, rows: &[(SnapshotId, Vec<f64>)]) {
    let borrowed: Vec<(SnapshotId, &[f64])> =
        rows.iter().map(|(id, v)| (*id, v.as_slice())).collect();
    io::write_real_trajectory(&dir.join(name), &borrowed).unwrap();
}

#[test]
fn embed_single_snapshot_gives_one_by_one_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_tau_fixture(dir.path(), "tau_run000.csv", &[(SnapshotId::new(0, 0), vec![0.5, 0.5])]);
    let out_csv = dir.path().join("dist.csv");
    let out = run(&[
        "embed", "--runs", dir.path().to_str().unwrap(),
        "--metric", "tau", "--out", out_csv.to_str().unwrap(),
    ]);
    assert_success(&out);
    let d = io::read_distance_csv(&out_csv).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.entries.get(0, 0), 0.0);
}

#[test]
fn embed_identical_snapshots_give_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    write_tau_fixture(
        dir.path(),
        "tau_run000.csv",
        &[
            (SnapshotId::new(0, 0), vec![0.25, 0.75]),
            (SnapshotId::new(0, 1), vec![0.25, 0.75]),
        ],
    );
    let out_csv = dir.path().join("dist.csv");
    assert_success(&run(&[
        "embed", "--runs", dir.path().to_str().unwrap(),
        "--metric", "tau", "--out", out_csv.to_str().unwrap(),
    ]));
    let d = io::read_distance_csv(&out_csv).unwrap();
    assert!(d.entries.as_slice().iter().all(|&v| v == 0.0));
}

#[test]
fn embed_matches_library_distance_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [
        (SnapshotId::new(0, 0), vec![0.1, 0.9, 0.4]),
        (SnapshotId::new(0, 1), vec![0.3, 0.3, 0.3]),
        (SnapshotId::new(1, 0), vec![0.8, 0.2, 0.6]),
    ];
    write_tau_fixture(dir.path(), "tau_run000.csv", &rows[..2]);
    write_tau_fixture(dir.path(), "tau_run001.csv", &rows[2..]);
    let out_csv = dir.path().join("dist.csv");
    assert_success(&run(&[
        "embed", "--runs", dir.path().to_str().unwrap(),
        "--metric", "tau", "--out", out_csv.to_str().unwrap(),
    ]));
    let from_cli = io::read_distance_csv(&out_csv).unwrap();

    let snapshots: Vec<(SnapshotId, SnapshotVector)> = rows
        .iter()
        .map(|(id, v)| (*id, SnapshotVector::Real(v.clone())))
        .collect();
    let oracle = distance_matrix(&snapshots).unwrap();
    assert_eq!(from_cli.ids, oracle.ids);
    assert_eq!(from_cli.entries.as_slice(), oracle.entries.as_slice());
}

#[test]
fn embed_rejects_mixed_vector_lengths() {
    let dir = tempfile::tempdir().unwrap();
    write_tau_fixture(dir.path(), "tau_run000.csv", &[(SnapshotId::new(0, 0), vec![0.5])]);
    write_tau_fixture(
        dir.path(),
        "tau_run001.csv",
        &[(SnapshotId::new(1, 0), vec![0.5, 0.5])],
    );
    let out = run(&[
        "embed", "--runs", dir.path().to_str().unwrap(),
        "--metric", "tau", "--out", dir.path().join("d.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn mds_recovers_collinear_fixture() {
    // Distances of points at 0, 1, 3 on a line; the 1-D embedding is
    // (-4/3, -1/3, 5/3) up to sign.
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("dist.csv");
    fs::write(
        &dist,
        "id,0:0,0:1,0:2\n\
         0:0,0.0,1.0,3.0\n\
         0:1,1.0,0.0,2.0\n\
         0:2,3.0,2.0,0.0\n",
    )
    .unwrap();
    let coords_csv = dir.path().join("coords.csv");
    let out = run(&[
        "mds", "--dist", dist.to_str().unwrap(), "--dims", "1",
        "--method", "classical", "--out", coords_csv.to_str().unwrap(),
    ]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("stress="), "stress must be printed: {stdout}");
    let coords = io::read_coords_csv(&coords_csv).unwrap();
    let xs: Vec<f64> = coords.iter().map(|(_, v)| v[0]).collect();
    let expected = [-4.0 / 3.0, -1.0 / 3.0, 5.0 / 3.0];
    let direct = xs.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-9);
    let flipped = xs.iter().zip(&expected).all(|(a, b)| (a + b).abs() < 1e-9);
    assert!(direct || flipped, "{xs:?}");
}

#[test]
fn mds_smacof_runs_on_planar_distances() {
    let dir = tempfile::tempdir().unwrap();
    // 4 points on a unit square.
    let pts: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut lines = vec![String::from("id,0:0,0:1,0:2,0:3")];
    for (i, a) in pts.iter().enumerate() {
        let mut row = format!("0:{i}");
        for b in &pts {
            let d = (a.0 - b.0).hypot(a.1 - b.1);
            row.push_str(&format!(",{}", io::fmt_f64(d)));
        }
        lines.push(row);
    }
    let dist = dir.path().join("dist.csv");
    fs::write(&dist, lines.join("\n") + "\n").unwrap();
    let coords_csv = dir.path().join("coords.csv");
    let out = run(&[
        "mds", "--dist", dist.to_str().unwrap(),
        "--method", "smacof", "--out", coords_csv.to_str().unwrap(),
    ]);
    assert_success(&out);
    let coords = io::read_coords_csv(&coords_csv).unwrap();
    assert_eq!(coords.len(), 4);
    // Pairwise embedded distances match the square's geometry.
    let d01 = ((coords[0].1[0] - coords[1].1[0]).powi(2)
        + (coords[0].1[1] - coords[1].1[1]).powi(2))
    .sqrt();
    assert!((d01 - 1.0).abs() < 1e-6, "side length {d01}");
}

#[test]
fn mds_rejects_non_square_input() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("dist.csv");
    fs::write(&dist, "id,0:0,0:1\n0:0,0.0,1.0\n").unwrap();
    let out = run(&[
        "mds", "--dist", dist.to_str().unwrap(),
        "--out", dir.path().join("c.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn plot_empty_coordinates_yield_axes_only_svg() {
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("coords.csv");
    fs::write(&coords, "id,x,y\n").unwrap();
    let svg_path = dir.path().join("plot.svg");
    assert_success(&run(&[
        "plot", "--coords", coords.to_str().unwrap(),
        "--out", svg_path.to_str().unwrap(),
    ]));
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<line"));
    assert!(!svg.contains("<circle"));
}

#[test]
fn plot_two_epochs_red_to_blue() {
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("coords.csv");
    fs::write(
        &coords,
        "id,x,y\n0:0,0.0,0.0\n0:1,1.0,1.0\n",
    )
    .unwrap();
    let svg_path = dir.path().join("plot.svg");
    assert_success(&run(&[
        "plot", "--coords", coords.to_str().unwrap(),
        "--out", svg_path.to_str().unwrap(),
    ]));
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert_eq!(svg.matches("<circle").count(), 2);
    assert!(svg.contains("rgb(255,0,0)"));
    assert!(svg.contains("rgb(0,0,255)"));
}

#[test]
fn plot_matches_golden_file() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/coords_3runs.csv");
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/plot_3runs.svg");
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("plot.svg");
    assert_success(&run(&[
        "plot", "--coords", fixture.to_str().unwrap(),
        "--out", svg_path.to_str().unwrap(),
        "--width", "400", "--height", "300",
    ]));
    let produced = fs::read(&svg_path).unwrap();
    let expected = fs::read(&golden).unwrap();
    assert_eq!(produced, expected, "plot output drifted from the golden file");
}

#[test]
fn plot_rejects_malformed_ids() {
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("coords.csv");
    fs::write(&coords, "id,x,y\nnot-an-id,0.0,0.0\n").unwrap();
    let out = run(&[
        "plot", "--coords", coords.to_str().unwrap(),
        "--out", dir.path().join("p.svg").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn simulate_then_embed_then_mds_pipeline() {
    // Decay trajectories feed the same embed/mds pipeline as MLP runs.
    let dir = tempfile::tempdir().unwrap();
    let sim_dir = dir.path().join("sim");
    assert_success(&run(&[
        "simulate", "--dims", "20", "--replicas", "3", "--steps", "200",
        "--snapshot-every", "50", "--seed", "5",
        "--out", sim_dir.to_str().unwrap(),
    ]));
    let dist = dir.path().join("dist.csv");
    assert_success(&run(&[
        "embed", "--runs", sim_dir.to_str().unwrap(),
        "--metric", "tau", "--out", dist.to_str().unwrap(),
    ]));
    let coords = dir.path().join("coords.csv");
    assert_success(&run(&[
        "mds", "--dist", dist.to_str().unwrap(),
        "--out", coords.to_str().unwrap(),
    ]));
    // 3 replicas x 5 snapshots (steps 0,50,100,150,200).
    assert_eq!(io::read_coords_csv(&coords).unwrap().len(), 15);
}

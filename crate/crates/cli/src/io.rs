//! File formats owned by the CLI: trajectory/distance/coordinate CSVs and
//! plain-text manifests. All floats are written with 17 significant
//! digits so write-then-read is lossless.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use sgdpaths::dataset::ImageSet;
use sgdpaths::equivalence::{DistanceMatrix, SnapshotId};
use sgdpaths::mds::Embedding;
use sgdpaths::numeric::DenseMatrix;

use crate::{CliError, CliResult};

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_f64(s: &str, context: &str) -> CliResult<f64> {
    s.parse()
        .map_err(|_| CliError::input(format!("{context}: `{s}` is not a number")))
}

fn open_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| open_error(path, e))
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| open_error(path, e))
}

fn writer(path: &Path) -> CliResult<BufWriter<fs::File>> {
    Ok(BufWriter::new(
        fs::File::create(path).map_err(|e| open_error(path, e))?,
    ))
}

fn finish(mut w: BufWriter<fs::File>, path: &Path) -> CliResult<()> {
    w.flush().map_err(|e| open_error(path, e))
}

/// FNV-1a 64-bit hash; used for dataset checksums in manifests.
pub fn fnv1a64(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn dataset_checksum(set: &ImageSet) -> String {
    let pixel_bytes = set.pixels().iter().flat_map(|p| p.to_le_bytes());
    let hash = fnv1a64(pixel_bytes.chain(set.labels().iter().copied()));
    format!("fnv1a64:{hash:016x}")
}

/// Plain-text manifest: one `key=value` per line, order preserved.
pub fn write_manifest(path: &Path, entries: &[(&str, String)]) -> CliResult<()> {
    let mut w = writer(path)?;
    for (key, value) in entries {
        writeln!(w, "{key}={value}").map_err(|e| open_error(path, e))?;
    }
    finish(w, path)
}

pub fn read_manifest(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = read_to_string(path)?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::input(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                lineno + 1
            ))
        })?;
        entries.push((k.to_string(), v.to_string()));
    }
    Ok(entries)
}

fn trajectory_header(columns: usize) -> String {
    let mut header = String::from("id");
    for i in 0..columns {
        header.push_str(&format!(",v{i}"));
    }
    header
}

/// Trajectory of real-valued snapshots: one row per snapshot, id first.
pub fn write_real_trajectory(
    path: &Path,
    rows: &[(SnapshotId, &[f64])],
) -> CliResult<()> {
    let columns = rows.first().map_or(0, |(_, v)| v.len());
    let mut w = writer(path)?;
    writeln!(w, "{}", trajectory_header(columns)).map_err(|e| open_error(path, e))?;
    for (id, values) in rows {
        let mut line = id.to_string();
        for v in *values {
            line.push(',');
            line.push_str(&fmt_f64(*v));
        }
        writeln!(w, "{line}").map_err(|e| open_error(path, e))?;
    }
    finish(w, path)
}

/// Trajectory of label snapshots (kappa): integer values.
pub fn write_label_trajectory(
    path: &Path,
    rows: &[(SnapshotId, &[u8])],
) -> CliResult<()> {
    let columns = rows.first().map_or(0, |(_, v)| v.len());
    let mut w = writer(path)?;
    writeln!(w, "{}", trajectory_header(columns)).map_err(|e| open_error(path, e))?;
    for (id, values) in rows {
        let mut line = id.to_string();
        for v in *values {
            line.push(',');
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}").map_err(|e| open_error(path, e))?;
    }
    finish(w, path)
}

fn split_rows(path: &Path, text: &str) -> CliResult<Vec<Vec<String>>> {
    let mut lines = text.lines();
    let header = match lines.next() {
        Some(h) => h,
        None => return Ok(Vec::new()),
    };
    let columns = header.split(',').count();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        if cells.len() != columns {
            return Err(CliError::input(format!(
                "{}:{}: row has {} cells, header has {columns}",
                path.display(),
                lineno + 2,
                cells.len()
            )));
        }
        rows.push(cells);
    }
    Ok(rows)
}

fn parse_id(path: &Path, cell: &str) -> CliResult<SnapshotId> {
    cell.parse::<SnapshotId>()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Read a trajectory file as real-valued snapshots.
pub fn read_real_trajectory(path: &Path) -> CliResult<Vec<(SnapshotId, Vec<f64>)>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for cells in split_rows(path, &text)? {
        let id = parse_id(path, &cells[0])?;
        let mut values = Vec::with_capacity(cells.len() - 1);
        for cell in &cells[1..] {
            values.push(parse_f64(cell, &format!("{}", path.display()))?);
        }
        out.push((id, values));
    }
    Ok(out)
}

/// Read a trajectory file as label snapshots.
pub fn read_label_trajectory(path: &Path) -> CliResult<Vec<(SnapshotId, Vec<u8>)>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for cells in split_rows(path, &text)? {
        let id = parse_id(path, &cells[0])?;
        let mut values = Vec::with_capacity(cells.len() - 1);
        for cell in &cells[1..] {
            values.push(cell.parse::<u8>().map_err(|_| {
                CliError::input(format!(
                    "{}: `{cell}` is not a class label",
                    path.display()
                ))
            })?);
        }
        out.push((id, values));
    }
    Ok(out)
}

/// Symmetric distance CSV with the ids as both header row and first
/// column.
pub fn write_distance_csv(path: &Path, d: &DistanceMatrix) -> CliResult<()> {
    let mut w = writer(path)?;
    let mut header = String::from("id");
    for id in &d.ids {
        header.push(',');
        header.push_str(&id.to_string());
    }
    writeln!(w, "{header}").map_err(|e| open_error(path, e))?;
    for i in 0..d.len() {
        let mut line = d.ids[i].to_string();
        for j in 0..d.len() {
            line.push(',');
            line.push_str(&fmt_f64(d.entries.get(i, j)));
        }
        writeln!(w, "{line}").map_err(|e| open_error(path, e))?;
    }
    finish(w, path)
}

pub fn read_distance_csv(path: &Path) -> CliResult<DistanceMatrix> {
    let text = read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::input(format!("{}: empty file", path.display())))?;
    let header_ids: Vec<&str> = header.split(',').skip(1).collect();
    let n = header_ids.len();
    let mut ids = Vec::with_capacity(n);
    for cell in &header_ids {
        ids.push(parse_id(path, cell)?);
    }
    let mut entries = DenseMatrix::zeros(n, n);
    let mut row_count = 0usize;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n + 1 {
            return Err(CliError::input(format!(
                "{}:{}: row has {} cells, expected {}",
                path.display(),
                lineno + 2,
                cells.len(),
                n + 1
            )));
        }
        if row_count >= n {
            return Err(CliError::input(format!(
                "{}: more rows than header ids (not square)",
                path.display()
            )));
        }
        let row_id = parse_id(path, cells[0])?;
        if row_id != ids[row_count] {
            return Err(CliError::input(format!(
                "{}: row {} id {row_id} does not match header id {}",
                path.display(),
                row_count,
                ids[row_count]
            )));
        }
        for (j, cell) in cells[1..].iter().enumerate() {
            entries.set(
                row_count,
                j,
                parse_f64(cell, &format!("{}", path.display()))?,
            );
        }
        row_count += 1;
    }
    if row_count != n {
        return Err(CliError::input(format!(
            "{}: {} data rows for {} header ids (not square)",
            path.display(),
            row_count,
            n
        )));
    }
    DistanceMatrix::new(ids, entries).map_err(CliError::from)
}

/// Coordinates CSV: id,x,y (or x0..x{d-1} for other dimensionalities).
pub fn write_coords_csv(path: &Path, embedding: &Embedding) -> CliResult<()> {
    let dims = embedding.dims();
    let mut w = writer(path)?;
    let mut header = String::from("id");
    if dims == 2 {
        header.push_str(",x,y");
    } else {
        for i in 0..dims {
            header.push_str(&format!(",x{i}"));
        }
    }
    writeln!(w, "{header}").map_err(|e| open_error(path, e))?;
    for (i, id) in embedding.ids.iter().enumerate() {
        let mut line = id.to_string();
        for c in 0..dims {
            line.push(',');
            line.push_str(&fmt_f64(embedding.coords.get(i, c)));
        }
        writeln!(w, "{line}").map_err(|e| open_error(path, e))?;
    }
    finish(w, path)
}

pub fn read_coords_csv(path: &Path) -> CliResult<Vec<(SnapshotId, Vec<f64>)>> {
    read_real_trajectory(path)
}

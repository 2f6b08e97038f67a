//! Dataset ingestion: IDX parsing, moment-based deskewing, test-subset
//! selection, and synthetic Gaussian blobs for desk-scale tests.

use crate::error::{Error, Result};
use crate::numeric::RngStream;

/// IDX magic for unsigned-byte image files (3 dimension fields follow).
pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
/// IDX magic for unsigned-byte label files (1 dimension field follows).
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// MNIST image side length.
pub const IMAGE_SIDE: usize = 28;

/// Immutable labelled image collection. Pixels are reals in [0,1],
/// labels are class indices in 0..=9.
#[derive(Debug, Clone)]
pub struct ImageSet {
    dims: usize,
    pixels: Vec<f64>,
    labels: Vec<u8>,
    provenance: String,
}

impl ImageSet {
    pub fn new(dims: usize, pixels: Vec<f64>, labels: Vec<u8>, provenance: String) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidArgument("image dimension must be positive".into()));
        }
        if pixels.len() != dims * labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels with {dims}-pixel images need {} pixel values, got {}",
                labels.len(),
                dims * labels.len(),
                pixels.len()
            )));
        }
        if let Some(pos) = pixels.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "pixel at flat index {pos} is {} (outside [0,1])",
                pixels[pos]
            )));
        }
        if let Some(pos) = labels.iter().position(|&l| l > 9) {
            return Err(Error::InvalidArgument(format!(
                "label at index {pos} is {} (outside 0..=9)",
                labels[pos]
            )));
        }
        Ok(Self {
            dims,
            pixels,
            labels,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Pixels per image.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn image(&self, i: usize) -> &[f64] {
        &self.pixels[i * self.dims..(i + 1) * self.dims]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Counts per class index 0..=9.
    pub fn label_histogram(&self) -> [usize; 10] {
        let mut hist = [0usize; 10];
        for &l in &self.labels {
            hist[l as usize] += 1;
        }
        hist
    }

    /// Build from the raw bytes of an IDX image file and an IDX label file.
    pub fn from_idx_bytes(images: &[u8], labels: &[u8], provenance: String) -> Result<Self> {
        let images = match parse_idx(images)? {
            IdxFile::Images { rows, cols, count, pixels } => {
                if rows != IMAGE_SIDE || cols != IMAGE_SIDE {
                    return Err(Error::IdxFormat(format!(
                        "expected {IMAGE_SIDE}x{IMAGE_SIDE} images, file declares {rows}x{cols}"
                    )));
                }
                (count, pixels)
            }
            IdxFile::Labels(_) => {
                return Err(Error::IdxFormat(format!(
                    "expected image magic {IDX_IMAGES_MAGIC:#010x}, found label magic {IDX_LABELS_MAGIC:#010x}"
                )))
            }
        };
        let labels = match parse_idx(labels)? {
            IdxFile::Labels(l) => l,
            IdxFile::Images { .. } => {
                return Err(Error::IdxFormat(format!(
                    "expected label magic {IDX_LABELS_MAGIC:#010x}, found image magic {IDX_IMAGES_MAGIC:#010x}"
                )))
            }
        };
        if images.0 != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "image file has {} samples, label file has {}",
                images.0,
                labels.len()
            )));
        }
        Self::new(IMAGE_SIDE * IMAGE_SIDE, images.1, labels, provenance)
    }

    /// A copy with every image deskewed.
    pub fn deskewed(&self) -> Result<ImageSet> {
        if self.dims != IMAGE_SIDE * IMAGE_SIDE {
            return Err(Error::ShapeMismatch(format!(
                "deskew needs {IMAGE_SIDE}x{IMAGE_SIDE} images, set has {} pixels per image",
                self.dims
            )));
        }
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for i in 0..self.len() {
            pixels.extend_from_slice(&deskew(self.image(i)));
        }
        ImageSet::new(
            self.dims,
            pixels,
            self.labels.clone(),
            format!("{} (deskewed)", self.provenance),
        )
    }
}

/// Parsed content of a single IDX file.
#[derive(Debug, Clone)]
pub enum IdxFile {
    Images {
        count: usize,
        rows: usize,
        cols: usize,
        /// Pixel bytes mapped to [0,1] by division by 255, sample-major.
        pixels: Vec<f64>,
    },
    Labels(Vec<u8>),
}

fn read_be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::IdxLength {
            expected: end,
            actual: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Parse one IDX file (images or labels, selected by magic).
pub fn parse_idx(bytes: &[u8]) -> Result<IdxFile> {
    let magic = read_be_u32(bytes, 0)?;
    match magic {
        IDX_IMAGES_MAGIC => {
            let count = read_be_u32(bytes, 4)? as usize;
            let rows = read_be_u32(bytes, 8)? as usize;
            let cols = read_be_u32(bytes, 12)? as usize;
            let expected = 16 + count * rows * cols;
            if bytes.len() != expected {
                return Err(Error::IdxLength {
                    expected,
                    actual: bytes.len(),
                });
            }
            let pixels = bytes[16..].iter().map(|&b| f64::from(b) / 255.0).collect();
            Ok(IdxFile::Images {
                count,
                rows,
                cols,
                pixels,
            })
        }
        IDX_LABELS_MAGIC => {
            let count = read_be_u32(bytes, 4)? as usize;
            let expected = 8 + count;
            if bytes.len() != expected {
                return Err(Error::IdxLength {
                    expected,
                    actual: bytes.len(),
                });
            }
            Ok(IdxFile::Labels(bytes[8..].to_vec()))
        }
        other => Err(Error::IdxFormat(format!(
            "unrecognized magic {other:#010x} (expected {IDX_IMAGES_MAGIC:#010x} for images or {IDX_LABELS_MAGIC:#010x} for labels)"
        ))),
    }
}

/// Central image moments used by the deskewer: total mass, center of mass
/// (row, col), and the central moments mu11 = cov(col,row) and
/// mu02 = var(row).
pub fn image_moments(image: &[f64]) -> (f64, f64, f64, f64, f64) {
    let side = IMAGE_SIDE;
    debug_assert_eq!(image.len(), side * side);
    let mut mass = 0.0;
    let mut sum_r = 0.0;
    let mut sum_c = 0.0;
    for r in 0..side {
        for c in 0..side {
            let p = image[r * side + c];
            mass += p;
            sum_r += p * r as f64;
            sum_c += p * c as f64;
        }
    }
    if mass <= 0.0 {
        return (0.0, 0.0, 0.0, 0.0, 0.0);
    }
    let cr = sum_r / mass;
    let cc = sum_c / mass;
    let mut mu11 = 0.0;
    let mut mu02 = 0.0;
    for r in 0..side {
        for c in 0..side {
            let p = image[r * side + c];
            let dr = r as f64 - cr;
            mu11 += p * dr * (c as f64 - cc);
            mu02 += p * dr * dr;
        }
    }
    (mass, cr, cc, mu11 / mass, mu02 / mass)
}

/// Moment-based deskew of one 28x28 image: shear columns by
/// alpha = mu11/mu02 about the center of mass, with linear interpolation
/// along rows, then re-clip to [0,1]. Images with no mass or no vertical
/// extent are returned unchanged.
pub fn deskew(image: &[f64]) -> Vec<f64> {
    let side = IMAGE_SIDE;
    assert_eq!(image.len(), side * side, "deskew expects a 28x28 image");
    let (mass, cr, _cc, mu11, mu02) = image_moments(image);
    if mass <= 0.0 || mu02 <= 1e-12 {
        return image.to_vec();
    }
    let alpha = mu11 / mu02;
    let mut out = vec![0.0; side * side];
    for r in 0..side {
        let shift = alpha * (r as f64 - cr);
        for c in 0..side {
            let src = c as f64 + shift;
            let left = src.floor();
            let frac = src - left;
            let li = left as isize;
            let mut v = 0.0;
            if (0..side as isize).contains(&li) {
                v += (1.0 - frac) * image[r * side + li as usize];
            }
            if (0..side as isize).contains(&(li + 1)) {
                v += frac * image[r * side + (li + 1) as usize];
            }
            out[r * side + c] = v.clamp(0.0, 1.0);
        }
    }
    out
}

/// First `n` samples in original order.
pub fn test_subset(set: &ImageSet, n: usize) -> Result<ImageSet> {
    if n > set.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {n} samples from a set of {}",
            set.len()
        )));
    }
    ImageSet::new(
        set.dims(),
        set.pixels[..n * set.dims()].to_vec(),
        set.labels[..n].to_vec(),
        format!("{} (first {n})", set.provenance),
    )
}

/// Default test-subset size.
pub const DEFAULT_TEST_SUBSET: usize = 1000;

/// Per-coordinate standard deviation of the synthetic clusters.
const BLOB_SIGMA: f64 = 0.05;

/// Isotropic Gaussian clusters clipped to [0,1], one cluster per class,
/// labels balanced. `separation` is measured in standard deviations from
/// each cluster center to the midpoint between neighbouring centers, so
/// the Bayes-optimal error is Phi(-separation): below 0.1% from
/// separation 4 up.
pub fn synthetic_blobs(
    dims: usize,
    classes: usize,
    per_class: usize,
    separation: f64,
    rng: &mut RngStream,
) -> Result<ImageSet> {
    if dims < 1 {
        return Err(Error::InvalidArgument("dims must be at least 1".into()));
    }
    if !(2..=10).contains(&classes) {
        return Err(Error::InvalidArgument(
            "classes must be between 2 and 10 (labels are digits)".into(),
        ));
    }
    if !separation.is_finite() || separation < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "separation must be finite and non-negative, got {separation}"
        )));
    }
    let centers = blob_centers(dims, classes, 2.0 * separation * BLOB_SIGMA);
    let mut pixels = Vec::with_capacity(dims * classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for (class, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            for &mu in center {
                let v = mu + BLOB_SIGMA * rng.standard_normal();
                pixels.push(v.clamp(0.0, 1.0));
            }
            labels.push(class as u8);
        }
    }
    ImageSet::new(dims, pixels, labels, "synthetic".into())
}

/// Class centers with pairwise distance at least `min_distance`, kept
/// well inside the unit cube around 0.5.
fn blob_centers(dims: usize, classes: usize, min_distance: f64) -> Vec<Vec<f64>> {
    let mut centers = vec![vec![0.5; dims]; classes];
    if dims == 1 {
        // Evenly spaced along the line.
        for (k, center) in centers.iter_mut().enumerate() {
            center[0] = 0.5 + min_distance * (k as f64 - (classes as f64 - 1.0) / 2.0);
        }
    } else if dims >= classes {
        // One axis per class; every pair sits at offset*sqrt(2).
        let offset = min_distance / std::f64::consts::SQRT_2;
        for (k, center) in centers.iter_mut().enumerate() {
            center[k] += offset;
        }
    } else {
        // Circle in the first two coordinates.
        let radius = min_distance / (2.0 * (std::f64::consts::PI / classes as f64).sin());
        for (k, center) in centers.iter_mut().enumerate() {
            let angle = std::f64::consts::TAU * k as f64 / classes as f64;
            center[0] += radius * angle.cos();
            center[1] += radius * angle.sin();
        }
    }
    for center in &mut centers {
        for v in center {
            *v = v.clamp(0.0, 1.0);
        }
    }
    centers
}

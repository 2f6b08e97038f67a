//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Deterministic and accurate for the matrix sizes this crate needs
//! (distance matrices up to a couple thousand rows). Not a general-purpose
//! eigensolver: symmetric input only.

use crate::error::{Error, Result};
use crate::numeric::matrix::DenseMatrix;

/// Sweep budget before giving up.
const MAX_SWEEPS: usize = 100;
/// Convergence: off-diagonal Frobenius norm relative to the input's norm.
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
/// Symmetry check: |a[i,j] - a[j,i]| relative to the largest entry.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Top-`k` eigenpairs of a symmetric matrix, eigenvalues descending,
/// eigenvectors as the columns of the returned matrix.
pub fn sym_eig(m: &DenseMatrix, k: usize) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenpairs from a {n}x{n} matrix"
        )));
    }
    let scale = m.max_abs_entry().max(1.0);
    let max_delta = m.max_asymmetry();
    if max_delta > SYMMETRY_TOLERANCE * scale {
        return Err(Error::NotSymmetric {
            max_delta,
            tol: SYMMETRY_TOLERANCE * scale,
        });
    }
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }

    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);
    let target = OFF_DIAGONAL_TOLERANCE * m.frobenius_norm();

    let mut converged = false;
    let mut last_off = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if last_off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        last_off = off_diagonal_norm(&a);
    }
    if !converged && last_off > target {
        return Err(Error::EigenNoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm: last_off,
        });
    }

    // Sort eigenpairs by eigenvalue, descending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).expect("finite"));

    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = DenseMatrix::from_fn(n, k, |r, c| v.get(r, order[c]));
    Ok((values[..k].to_vec(), vectors))
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a.get(p, q) * a.get(p, q);
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating a[p,q], accumulated into v.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
    // Smaller-magnitude root of t^2 + 2*theta*t - 1 = 0 keeps the rotation
    // angle below 45 degrees.
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, c * aip - s * aiq);
        a.set(i, q, s * aip + c * aiq);
    }
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, c * apj - s * aqj);
        a.set(q, j, s * apj + c * aqj);
    }
    // Pin the annihilated pair to kill rounding residue.
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);

    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, c * vip - s * viq);
        v.set(i, q, s * vip + c * viq);
    }
}

//! Row-major dense matrices and the handful of kernels the solvers need.
//!
//! Every routine runs sequentially in a fixed loop order, so identical
//! inputs give bit-identical outputs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Power-iteration tolerance used for step sizes.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Power-iteration cap used for step sizes.
pub const SPECTRAL_MAX_ITER: usize = 1000;

#[derive(Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DataLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::ShapeMismatch {
                    op: "from_rows",
                    left: (i, row.len()),
                    right: (0, n_cols),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n_rows, n_cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        debug_assert!(rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Fills a matrix from `f(row, col)`. The caller is responsible for
    /// producing finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(self.mismatch("matmul", other));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(self.mismatch("t_matmul", other));
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let b_row = other.row(l);
            for (i, &a) in self.row(l).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · otherᵀ` without materializing the transpose.
    pub fn matmul_t(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(self.mismatch("matmul_t", other));
        }
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a_row = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = dot(a_row, other.row(j));
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with("add", other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with("sub", other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        self.zip_with("add_scaled", other, |a, b| a + s * b)
    }

    pub fn trace(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                op: "trace",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_sq())
    }

    /// `‖self − other‖²_F`.
    pub fn distance_sq(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(self.mismatch("distance_sq", other));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    /// Largest singular value by two-vector subspace iteration on
    /// `selfᵀ·self` with a Rayleigh–Ritz step.
    ///
    /// Carrying a second vector resolves a nearly tied top pair of singular
    /// values, where single-vector power iteration crawls. Stops once the
    /// Ritz residual `‖MᵀMx − θx‖` drops below `tol·θ`, or after `max_iter`
    /// sweeps.
    ///
    /// Start vectors are fixed low-discrepancy sequences
    /// `0.5 + frac((i+1)·α)`. The all-ones vector lies in the null space of
    /// every graph Laplacian, and symmetric ramps are eigenvectors of path
    /// graphs, so neither is usable as a start.
    pub fn spectral_norm(&self, tol: f64, max_iter: usize) -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        const SQRT_2: f64 = core::f64::consts::SQRT_2;
        let n = self.cols;
        let weyl = |alpha: f64| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let t = (i + 1) as f64 * alpha;
                    0.5 + (t - libm::floor(t))
                })
                .collect()
        };
        let mut v1 = weyl(INV_PHI);
        let mut v2 = weyl(SQRT_2);
        orthonormalize(&mut v1, &mut v2);
        let mut z1 = vec![0.0; n];
        let mut z2 = vec![0.0; n];
        let mut scratch = vec![0.0; self.rows];
        let mut theta = 0.0;
        for _ in 0..max_iter.max(1) {
            self.gram_apply(&v1, &mut z1, &mut scratch);
            self.gram_apply(&v2, &mut z2, &mut scratch);
            // Ritz pair of the projected 2×2 problem [[a, b], [b, c]].
            let (a, b, c) = (dot(&v1, &z1), dot(&v1, &z2), dot(&v2, &z2));
            let half_gap = 0.5 * (a - c);
            theta = 0.5 * (a + c) + libm::sqrt(half_gap * half_gap + b * b);
            let (y1, y2) = if b == 0.0 {
                if a >= c {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            } else if a >= c {
                (theta - c, b)
            } else {
                (b, theta - a)
            };
            let y_norm = libm::sqrt(y1 * y1 + y2 * y2);
            let (y1, y2) = (y1 / y_norm, y2 / y_norm);
            let residual_sq: f64 = (0..n)
                .map(|j| {
                    let mx = y1 * z1[j] + y2 * z2[j];
                    let x = y1 * v1[j] + y2 * v2[j];
                    (mx - theta * x) * (mx - theta * x)
                })
                .sum();
            if !(theta > 0.0) || libm::sqrt(residual_sq) <= tol * theta {
                break;
            }
            core::mem::swap(&mut v1, &mut z1);
            core::mem::swap(&mut v2, &mut z2);
            orthonormalize(&mut v1, &mut v2);
        }
        libm::sqrt(theta.max(0.0))
    }

    /// `out = selfᵀ·self·v`, with `scratch` holding `self·v`.
    fn gram_apply(&self, v: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        for (i, s) in scratch.iter_mut().enumerate() {
            *s = dot(self.row(i), v);
        }
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, &s) in scratch.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += m * s;
            }
        }
    }

    fn zip_with(
        &self,
        op: &'static str,
        other: &Self,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(self.mismatch(op, other));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn mismatch(&self, op: &'static str, other: &Self) -> Error {
        Error::ShapeMismatch {
            op,
            left: self.shape(),
            right: other.shape(),
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean distance squared between two equal-length slices.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gram–Schmidt on two vectors. A second vector that collapses onto the
/// first (rank one, or a single column) is set to zero.
fn orthonormalize(v1: &mut [f64], v2: &mut [f64]) {
    normalize(v1);
    let before = libm::sqrt(dot(v2, v2));
    let proj = dot(v1, v2);
    v2.iter_mut()
        .zip(v1.iter())
        .for_each(|(b, a)| *b -= proj * a);
    if normalize(v2) <= 1e-12 * before {
        v2.iter_mut().for_each(|x| *x = 0.0);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = libm::sqrt(dot(v, v));
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

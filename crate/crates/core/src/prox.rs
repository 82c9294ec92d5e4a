//! Euclidean projections onto the two constraint sets.
//!
//! `H` lives in the nonnegative orthant; `W` lives in the nonnegative orthant
//! intersected with "at most `k` nonzero rows". Both projections are closed
//! form: clip, then (for `W`) keep the `k` rows of largest ℓ2 norm.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Rows kept by [`project_row_sparse`].
#[derive(Debug, Clone, PartialEq)]
pub struct RowSelection {
    /// Sorted ascending, exactly `k` entries.
    pub kept_rows: Vec<usize>,
    /// ℓ2 norm of every row after clipping, used to rank them.
    pub row_norms: Vec<f64>,
}

/// Elementwise `max(0, ·)`.
pub fn project_nonneg(m: &DenseMatrix) -> DenseMatrix {
    m.map(|v| if v > 0.0 { v } else { 0.0 })
}

/// Projection onto `{W ≥ 0, ‖W‖_{2,0} ≤ k}`.
///
/// Clips first, then zeroes every row outside the `k` largest norms. Equal
/// norms are broken toward the lower row index.
pub fn project_row_sparse(m: &DenseMatrix, k: usize) -> Result<(DenseMatrix, RowSelection)> {
    let p = m.rows();
    if k == 0 || k > p {
        return Err(Error::invalid(
            "sparsity_k",
            alloc::format!("must be in [1, {p}], got {k}"),
        ));
    }
    let mut out = project_nonneg(m);
    let norms_sq: Vec<f64> = (0..p)
        .map(|i| out.row(i).iter().map(|v| v * v).sum())
        .collect();

    let mut order: Vec<usize> = (0..p).collect();
    if k < p {
        let by_norm = |a: &usize, b: &usize| -> Ordering {
            norms_sq[*b].total_cmp(&norms_sq[*a]).then(a.cmp(b))
        };
        order.select_nth_unstable_by(k - 1, by_norm);
        order.truncate(k);
        order.sort_unstable();
        let mut keep = alloc::vec![false; p];
        for &i in &order {
            keep[i] = true;
        }
        for (i, kept) in keep.into_iter().enumerate() {
            if !kept {
                out.row_mut(i).iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }
    let selection = RowSelection {
        kept_rows: order,
        row_norms: norms_sq.into_iter().map(libm::sqrt).collect(),
    };
    Ok((out, selection))
}

/// Number of rows with at least one nonzero entry.
pub fn nonzero_rows(m: &DenseMatrix) -> usize {
    (0..m.rows())
        .filter(|&i| m.row(i).iter().any(|&v| v != 0.0))
        .count()
}

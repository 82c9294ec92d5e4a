//! Sample-similarity graphs and their Laplacians.
//!
//! Samples are the columns of the data matrix. A [`GraphModel`] keeps the
//! symmetric adjacency `A`, the diagonal degree matrix `D` and `L = D − A`
//! together, plus the spectral norm of `L` which the solvers reuse on every
//! iteration.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, SPECTRAL_MAX_ITER, SPECTRAL_TOL};

/// Default neighbor count for kNN graphs. The value is a guess; nothing in
/// the model pins it down.
pub const DEFAULT_NEIGHBORS: usize = 5;

/// Edge weighting for connected sample pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum WeightScheme {
    /// 1 for every edge.
    ZeroOne,
    /// `exp(−‖x_j − x_l‖² / 2σ²)`. With `sigma: None` the bandwidth is the
    /// median distance over connected pairs.
    GaussianKernel { sigma: Option<f64> },
    /// `x_jᵀ x_l`. Can be negative for data with mixed signs.
    DotProduct,
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme::GaussianKernel { sigma: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphModel {
    adjacency: DenseMatrix,
    degree: DenseMatrix,
    laplacian: DenseMatrix,
    laplacian_norm: f64,
    /// `None` when the adjacency was supplied directly.
    scheme: Option<WeightScheme>,
    neighbors: Option<usize>,
}

impl GraphModel {
    /// Builds a kNN graph over the columns of `x`.
    ///
    /// Each sample links to its `neighbors` nearest samples by Euclidean
    /// distance (ties go to the lower index). An edge exists when either
    /// endpoint picked the other; since every scheme is symmetric in its two
    /// arguments this is the same as `a_jl := max(a_jl, a_lj)` for
    /// nonnegative weights.
    pub fn build_knn_graph(
        x: &DenseMatrix,
        neighbors: usize,
        scheme: WeightScheme,
    ) -> Result<Self> {
        let n = x.cols();
        if neighbors == 0 || neighbors >= n {
            return Err(Error::invalid(
                "neighbors",
                alloc::format!("must be in [1, {}), got {neighbors}", n),
            ));
        }
        if let WeightScheme::GaussianKernel { sigma: Some(s) } = scheme {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid(
                    "sigma",
                    alloc::format!("must be positive, got {s}"),
                ));
            }
        }

        let samples: Vec<Vec<f64>> = (0..n).map(|j| x.column(j)).collect();
        let mut dist_sq = DenseMatrix::zeros(n, n);
        for j in 0..n {
            for l in (j + 1)..n {
                let d = linalg::sq_dist(&samples[j], &samples[l]);
                dist_sq.set(j, l, d);
                dist_sq.set(l, j, d);
            }
        }

        let mut connected = alloc::vec![false; n * n];
        let mut order: Vec<usize> = Vec::with_capacity(n - 1);
        for j in 0..n {
            order.clear();
            order.extend((0..n).filter(|&l| l != j));
            order.sort_by(|&a, &b| {
                dist_sq
                    .get(j, a)
                    .total_cmp(&dist_sq.get(j, b))
                    .then(a.cmp(&b))
            });
            for &l in &order[..neighbors] {
                connected[j * n + l] = true;
                connected[l * n + j] = true;
            }
        }

        let resolved = match scheme {
            WeightScheme::GaussianKernel { sigma: None } => {
                let mut dists: Vec<f64> = Vec::new();
                for j in 0..n {
                    for l in (j + 1)..n {
                        if connected[j * n + l] {
                            dists.push(libm::sqrt(dist_sq.get(j, l)));
                        }
                    }
                }
                WeightScheme::GaussianKernel {
                    sigma: Some(median_bandwidth(&mut dists)),
                }
            }
            other => other,
        };

        let adjacency = DenseMatrix::from_fn(n, n, |j, l| {
            if !connected[j * n + l] {
                return 0.0;
            }
            match resolved {
                WeightScheme::ZeroOne => 1.0,
                WeightScheme::GaussianKernel { sigma } => {
                    let s = sigma.unwrap_or(1.0);
                    libm::exp(-dist_sq.get(j, l) / (2.0 * s * s))
                }
                WeightScheme::DotProduct => linalg::dot(&samples[j], &samples[l]),
            }
        });
        if !adjacency.is_finite() {
            return Err(Error::invalid("x", "edge weights overflowed"));
        }
        let mut graph = Self::derive(adjacency);
        graph.scheme = Some(resolved);
        graph.neighbors = Some(neighbors);
        Ok(graph)
    }

    /// Wraps a user-supplied adjacency matrix.
    ///
    /// The input must be square, symmetric to within 1e-12 and have an exactly
    /// zero diagonal. Near-symmetric input is averaged with its transpose so
    /// the stored adjacency is exactly symmetric.
    pub fn from_adjacency(a: DenseMatrix) -> Result<Self> {
        let (rows, cols) = a.shape();
        if rows != cols {
            return Err(Error::NotSquare {
                op: "from_adjacency",
                rows,
                cols,
            });
        }
        for j in 0..rows {
            if a.get(j, j) != 0.0 {
                return Err(Error::NonzeroDiagonal { index: j });
            }
            for l in (j + 1)..rows {
                if (a.get(j, l) - a.get(l, j)).abs() > 1e-12 {
                    return Err(Error::NotSymmetric { row: j, col: l });
                }
            }
        }
        let sym = DenseMatrix::from_fn(rows, rows, |j, l| {
            if j == l {
                0.0
            } else {
                0.5 * (a.get(j, l) + a.get(l, j))
            }
        });
        Ok(Self::derive(sym))
    }

    /// Graph with no edges over `n` samples. `L = 0`.
    pub fn empty(n: usize) -> Self {
        Self::derive(DenseMatrix::zeros(n, n))
    }

    fn derive(adjacency: DenseMatrix) -> Self {
        let n = adjacency.rows();
        let degrees: Vec<f64> = (0..n).map(|j| adjacency.row(j).iter().sum()).collect();
        let degree = DenseMatrix::from_diagonal(&degrees);
        let laplacian = DenseMatrix::from_fn(n, n, |j, l| {
            if j == l {
                degrees[j] - adjacency.get(j, j)
            } else {
                -adjacency.get(j, l)
            }
        });
        let laplacian_norm = laplacian.spectral_norm(SPECTRAL_TOL, SPECTRAL_MAX_ITER);
        Self {
            adjacency,
            degree,
            laplacian,
            laplacian_norm,
            scheme: None,
            neighbors: None,
        }
    }

    pub fn adjacency(&self) -> &DenseMatrix {
        &self.adjacency
    }

    pub fn degree(&self) -> &DenseMatrix {
        &self.degree
    }

    pub fn laplacian(&self) -> &DenseMatrix {
        &self.laplacian
    }

    /// `‖L‖₂`, computed once at construction.
    pub fn laplacian_norm(&self) -> f64 {
        self.laplacian_norm
    }

    pub fn scheme(&self) -> Option<WeightScheme> {
        self.scheme
    }

    pub fn neighbors(&self) -> Option<usize> {
        self.neighbors
    }

    pub fn samples(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn edge_count(&self) -> usize {
        let n = self.samples();
        (0..n)
            .map(|j| {
                ((j + 1)..n)
                    .filter(|&l| self.adjacency.get(j, l) != 0.0)
                    .count()
            })
            .sum()
    }
}

fn median_bandwidth(dists: &mut [f64]) -> f64 {
    dists.sort_by(f64::total_cmp);
    let m = dists.len();
    let median = if m == 0 {
        0.0
    } else if m % 2 == 1 {
        dists[m / 2]
    } else {
        0.5 * (dists[m / 2 - 1] + dists[m / 2])
    };
    if median > 0.0 {
        return median;
    }
    // more than half the edges join coincident samples
    let positive: Vec<f64> = dists.iter().copied().filter(|&d| d > 0.0).collect();
    if positive.is_empty() {
        1.0
    } else {
        positive.iter().sum::<f64>() / positive.len() as f64
    }
}

/// `Tr(H L Hᵀ)`, the graph smoothness of the embedding `h` (one column per
/// sample). Equals `½ Σ_{j,l} ‖h_j − h_l‖² a_jl`.
pub fn laplacian_quadratic(h: &DenseMatrix, graph: &GraphModel) -> Result<f64> {
    let l = graph.laplacian();
    if h.cols() != l.rows() {
        return Err(Error::ShapeMismatch {
            op: "laplacian_quadratic",
            left: h.shape(),
            right: l.shape(),
        });
    }
    let mut total = 0.0;
    for i in 0..h.rows() {
        let row = h.row(i);
        for (j, &hj) in row.iter().enumerate() {
            if hj != 0.0 {
                total += hj * linalg::dot(l.row(j), row);
            }
        }
    }
    Ok(total)
}

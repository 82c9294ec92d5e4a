//! k-means on the learned embedding and the scores used to judge it:
//! normalized mutual information, clustering accuracy under the best
//! cluster-to-class matching, and relative reconstruction error.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};

/// Lloyd iteration cap per restart.
pub const KMEANS_MAX_ITER: usize = 300;
pub const DEFAULT_RESTARTS: usize = 10;
/// Largest number of distinct labels [`acc`] accepts on either side.
pub const ACC_MAX_LABELS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    /// One row per cluster.
    pub centroids: DenseMatrix,
    pub inertia: f64,
    pub n_iter: usize,
    /// Inertia after each assignment step of the winning restart.
    pub inertia_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    /// Absent when no ground-truth labels are available.
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Option::is_none", default)
    )]
    pub nmi: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Option::is_none", default)
    )]
    pub acc: Option<f64>,
    pub relative_error: f64,
}

/// Lloyd's algorithm with k-means++ seeding on the rows of `points`.
///
/// Runs `restarts` independent restarts (restart `i` draws from stream `i` of
/// a ChaCha generator keyed by `seed`) and keeps the lowest inertia, ties
/// going to the earlier restart.
pub fn kmeans(
    points: &DenseMatrix,
    clusters: usize,
    seed: u64,
    restarts: usize,
) -> Result<ClusteringResult> {
    let n = points.rows();
    if clusters == 0 || clusters > n {
        return Err(Error::invalid(
            "clusters",
            alloc::format!("must be in [1, {n}], got {clusters}"),
        ));
    }
    if restarts == 0 {
        return Err(Error::invalid("restarts", "must be positive"));
    }
    let mut best: Option<ClusteringResult> = None;
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let run = lloyd(points, plus_plus_seeds(points, clusters, &mut rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn plus_plus_seeds(points: &DenseMatrix, clusters: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let n = points.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = (0..n)
        .map(|i| linalg::sq_dist(points.row(i), points.row(chosen[0])))
        .collect();
    while chosen.len() < clusters {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            // rounding can leave `target` just above the last weight
            while d2[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(linalg::sq_dist(points.row(i), points.row(next)));
        }
    }
    DenseMatrix::from_fn(clusters, points.cols(), |c, j| points.get(chosen[c], j))
}

fn lloyd(points: &DenseMatrix, mut centroids: DenseMatrix) -> ClusteringResult {
    let n = points.rows();
    let k = centroids.rows();
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut n_iter = 0;
    loop {
        let mut changed = false;
        let mut inertia = 0.0;
        for (i, label) in labels.iter_mut().enumerate() {
            let (best, dist) = nearest(points.row(i), &centroids);
            inertia += dist;
            if *label != best {
                *label = best;
                changed = true;
            }
        }
        history.push(inertia);
        n_iter += 1;
        if !changed || n_iter >= KMEANS_MAX_ITER {
            break;
        }
        let mut sums = DenseMatrix::zeros(k, points.cols());
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, &v) in sums.row_mut(c).iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            // an empty cluster keeps its previous centroid
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for (dst, &s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s * inv;
                }
            }
        }
    }
    let inertia = labels
        .iter()
        .enumerate()
        .map(|(i, &c)| linalg::sq_dist(points.row(i), centroids.row(c)))
        .sum();
    ClusteringResult {
        labels,
        centroids,
        inertia,
        n_iter,
        inertia_history: history,
    }
}

fn nearest(point: &[f64], centroids: &DenseMatrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = linalg::sq_dist(point, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Maps arbitrary labels onto `0..m` in order of first appearance.
fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut seen: Vec<usize> = Vec::new();
    let out = labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect();
    (out, seen.len())
}

fn contingency(a: &[usize], b: &[usize]) -> Result<(Vec<Vec<usize>>, usize, usize)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::invalid("labels", "must not be empty"));
    }
    let (a, ka) = compact(a);
    let (b, kb) = compact(b);
    let mut table = vec![vec![0usize; kb]; ka];
    for (&i, &j) in a.iter().zip(&b) {
        table[i][j] += 1;
    }
    Ok((table, ka, kb))
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .sum()
}

/// `2·I(A, B) / (H(A) + H(B))` with natural logs. Two single-cluster
/// labelings score 1.
pub fn nmi(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    let (table, ka, kb) = contingency(labels_a, labels_b)?;
    let n = labels_a.len() as f64;
    let row: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<usize> = (0..kb)
        .map(|j| (0..ka).map(|i| table[i][j]).sum())
        .collect();
    let ha = entropy(row.iter().copied(), n);
    let hb = entropy(col.iter().copied(), n);
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let c = table[i][j];
            if c > 0 {
                let c = c as f64;
                mi += c / n * libm::log(n * c / (row[i] as f64 * col[j] as f64));
            }
        }
    }
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

/// Fraction of samples labeled correctly under the best one-to-one mapping
/// from predicted clusters to true classes.
pub fn acc(labels_pred: &[usize], labels_true: &[usize]) -> Result<f64> {
    let (table, kp, kt) = contingency(labels_pred, labels_true)?;
    if kp > ACC_MAX_LABELS || kt > ACC_MAX_LABELS {
        return Err(Error::invalid(
            "labels",
            alloc::format!("at most {ACC_MAX_LABELS} distinct labels per side, got {kp} and {kt}"),
        ));
    }
    let m = kp.max(kt);
    let max_count = table.iter().flatten().copied().max().unwrap_or(0) as i64;
    let cost: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let c = if i < kp && j < kt { table[i][j] } else { 0 };
                    max_count - c as i64
                })
                .collect()
        })
        .collect();
    let assignment = hungarian_min(&cost);
    let matched: usize = assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < kp && j < kt)
        .map(|(i, &j)| table[i][j])
        .sum();
    Ok(matched as f64 / labels_pred.len() as f64)
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(m³)). Returns the column assigned to each row.
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let m = cost.len();
    // 1-based bookkeeping; index 0 is a sentinel column
    let mut u = vec![0i64; m + 1];
    let mut v = vec![0i64; m + 1];
    let mut row_of_col = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; m];
    for j in 1..=m {
        if row_of_col[j] > 0 {
            assignment[row_of_col[j] - 1] = j - 1;
        }
    }
    assignment
}

/// `‖X − WH‖_F / ‖X‖_F`.
pub fn relative_error(x: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
    let denom = x.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::invalid(
            "x",
            "relative error is undefined for a zero matrix",
        ));
    }
    let wh = w.matmul(h)?;
    Ok(libm::sqrt(x.distance_sq(&wh)?) / denom)
}

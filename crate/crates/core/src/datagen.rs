//! Synthetic benchmark data: Gaussian clusters with appended noise features,
//! and a block-structured adjacency matrix that encodes cluster membership.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Layout of the synthetic dataset. The default sizes are a guess and carry
/// no special meaning.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SyntheticSpec {
    pub samples_per_cluster: usize,
    pub signal_features: usize,
    pub noise_rows: usize,
    /// One mean per cluster; every signal coordinate of a cluster shares it.
    pub means: Vec<f64>,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            samples_per_cluster: 50,
            signal_features: 17,
            noise_rows: 3,
            means: vec![-2.0, 0.0, 2.0],
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn clusters(&self) -> usize {
        self.means.len()
    }

    pub fn samples(&self) -> usize {
        self.samples_per_cluster * self.clusters()
    }

    pub fn features(&self) -> usize {
        self.signal_features + self.noise_rows
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_cluster == 0 {
            return Err(Error::invalid("samples_per_cluster", "must be positive"));
        }
        if self.signal_features == 0 {
            return Err(Error::invalid("signal_features", "must be positive"));
        }
        if self.means.is_empty() {
            return Err(Error::invalid("means", "need at least one cluster"));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("means", "must be finite"));
        }
        Ok(())
    }
}

/// Generates `(X, labels)`.
///
/// Columns are samples, grouped by cluster. Signal rows of cluster `c` are
/// drawn from `N(means[c], I)`, noise rows from `N(0, 1)`. The whole matrix
/// is min-max normalized with one global minimum and range, and each noise
/// row is then shuffled across columns independently.
pub fn generate_synthetic(spec: &SyntheticSpec) -> (DenseMatrix, Vec<usize>) {
    try_generate_synthetic(spec).expect("invalid synthetic spec")
}

pub fn try_generate_synthetic(spec: &SyntheticSpec) -> Result<(DenseMatrix, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.samples();
    let p = spec.features();
    let labels: Vec<usize> = (0..n).map(|j| j / spec.samples_per_cluster).collect();

    // sample-major draws so each column is one multivariate normal vector
    let mut x = DenseMatrix::zeros(p, n);
    for (j, &c) in labels.iter().enumerate() {
        for i in 0..spec.signal_features {
            let z: f64 = StandardNormal.sample(&mut rng);
            x.set(i, j, spec.means[c] + z);
        }
    }
    for i in spec.signal_features..p {
        for j in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            x.set(i, j, z);
        }
    }

    let lo = x.min_value();
    let range = x.max_value() - lo;
    let mut x = if range > 0.0 {
        x.map(|v| (v - lo) / range)
    } else {
        x.map(|_| 0.0)
    };
    for i in spec.signal_features..p {
        x.row_mut(i).shuffle(&mut rng);
    }
    Ok((x, labels))
}

/// Random block-diagonal adjacency.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BlockAdjacencySpec {
    pub block_sizes: Vec<usize>,
    /// Probability that a within-block pair is connected.
    pub within_block_density: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub seed: u64,
}

impl Default for BlockAdjacencySpec {
    fn default() -> Self {
        Self {
            block_sizes: vec![50, 50, 50],
            within_block_density: 0.5,
            weight_low: 0.5,
            weight_high: 1.0,
            seed: 0,
        }
    }
}

impl BlockAdjacencySpec {
    pub fn for_blocks(block_sizes: Vec<usize>) -> Self {
        Self {
            block_sizes,
            ..Self::default()
        }
    }

    pub fn samples(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(Error::invalid(
                "block_sizes",
                "need at least one nonempty block",
            ));
        }
        if !(self.within_block_density > 0.0 && self.within_block_density <= 1.0) {
            return Err(Error::invalid("within_block_density", "must be in (0, 1]"));
        }
        if !(self.weight_low > 0.0
            && self.weight_low <= self.weight_high
            && self.weight_high.is_finite())
        {
            return Err(Error::invalid(
                "weight_low",
                "need 0 < weight_low <= weight_high",
            ));
        }
        Ok(())
    }
}

/// Zero everywhere except inside the diagonal blocks, where each
/// upper-triangular pair is connected with probability
/// `within_block_density` and weight uniform in `[weight_low, weight_high]`,
/// then mirrored.
pub fn generate_block_adjacency(spec: &BlockAdjacencySpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let n = spec.samples();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut a = DenseMatrix::zeros(n, n);
    let mut start = 0;
    for &size in &spec.block_sizes {
        for j in start..start + size {
            for l in (j + 1)..start + size {
                if rng.random::<f64>() < spec.within_block_density {
                    let w = if spec.weight_low == spec.weight_high {
                        spec.weight_low
                    } else {
                        rng.random_range(spec.weight_low..=spec.weight_high)
                    };
                    a.set(j, l, w);
                    a.set(l, j, w);
                }
            }
        }
        start += size;
    }
    Ok(a)
}

/// Block sizes matching the cluster layout of a synthetic dataset.
pub fn blocks_for(spec: &SyntheticSpec) -> Vec<usize> {
    vec![spec.samples_per_cluster; spec.clusters()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphModel;
    use crate::objective::ProblemSpec;

    #[test]
    fn single_cluster_without_noise_spans_unit_interval() {
        let spec = SyntheticSpec {
            samples_per_cluster: 30,
            signal_features: 4,
            noise_rows: 0,
            means: vec![0.0],
            seed: 3,
        };
        let (x, labels) = generate_synthetic(&spec);
        assert_eq!(x.shape(), (4, 30));
        assert_eq!(x.min_value(), 0.0);
        assert_eq!(x.max_value(), 1.0);
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn default_shape_and_range() {
        let (x, labels) = generate_synthetic(&SyntheticSpec::default());
        assert_eq!(x.shape(), (20, 150));
        assert_eq!(labels.len(), 150);
        assert!(x.min_value() >= 0.0 && x.max_value() <= 1.0);
        for c in 0..3 {
            assert_eq!(labels.iter().filter(|&&l| l == c).count(), 50);
        }
    }

    #[test]
    fn cluster_means_keep_their_order() {
        let spec = SyntheticSpec::default();
        let (x, labels) = generate_synthetic(&spec);
        let mut means = [0.0; 3];
        for (j, &c) in labels.iter().enumerate() {
            for i in 0..spec.signal_features {
                means[c] += x.get(i, j);
            }
        }
        assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
    }

    #[test]
    fn noise_rows_do_not_follow_clusters() {
        let spec = SyntheticSpec::default();
        let (x, labels) = generate_synthetic(&spec);
        // per-cluster noise means are all close to the overall noise mean
        for i in spec.signal_features..spec.features() {
            let overall = x.row(i).iter().sum::<f64>() / 150.0;
            for c in 0..3 {
                let m: f64 = labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == c)
                    .map(|(j, _)| x.get(i, j))
                    .sum::<f64>()
                    / 50.0;
                assert!((m - overall).abs() < 0.1);
            }
        }
    }

    #[test]
    fn synthetic_is_seeded() {
        let a = generate_synthetic(&SyntheticSpec::default());
        let b = generate_synthetic(&SyntheticSpec::default());
        assert_eq!(a, b);
        let c = generate_synthetic(&SyntheticSpec {
            seed: 1,
            ..Default::default()
        });
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn synthetic_is_a_valid_problem() {
        let (x, _) = generate_synthetic(&SyntheticSpec::default());
        assert!(ProblemSpec::new(x, 3, 17, 1.0, GraphModel::empty(150)).is_ok());
    }

    #[test]
    fn invalid_synthetic_spec() {
        let spec = SyntheticSpec {
            means: vec![],
            ..Default::default()
        };
        assert!(try_generate_synthetic(&spec).is_err());
    }

    #[test]
    fn dense_unit_blocks() {
        let spec = BlockAdjacencySpec {
            block_sizes: vec![3, 2],
            within_block_density: 1.0,
            weight_low: 1.0,
            weight_high: 1.0,
            seed: 0,
        };
        let a = generate_block_adjacency(&spec).unwrap();
        for j in 0..5 {
            for l in 0..5 {
                let same = (j < 3) == (l < 3);
                let expected = if j != l && same { 1.0 } else { 0.0 };
                assert_eq!(a.get(j, l), expected);
            }
        }
    }

    #[test]
    fn single_block_is_symmetric() {
        let a = generate_block_adjacency(&BlockAdjacencySpec::for_blocks(vec![12])).unwrap();
        assert!(GraphModel::from_adjacency(a).is_ok());
    }

    #[test]
    fn default_blocks_have_no_cross_edges() {
        let spec = BlockAdjacencySpec::default();
        let a = generate_block_adjacency(&spec).unwrap();
        let block = |j: usize| j / 50;
        let mut within = 0;
        for j in 0..150 {
            assert_eq!(a.get(j, j), 0.0);
            for l in 0..150 {
                let v = a.get(j, l);
                assert_eq!(v, a.get(l, j));
                if block(j) != block(l) {
                    assert_eq!(v, 0.0);
                } else if v != 0.0 {
                    assert!((0.5..=1.0).contains(&v));
                    within += 1;
                }
            }
        }
        // 3 blocks · 50·49 ordered pairs · density 0.5 ≈ 3675
        assert!((3000..4400).contains(&within), "{within}");
        let g = GraphModel::from_adjacency(a.clone()).unwrap();
        for j in 0..150 {
            assert!(g.laplacian().row(j).iter().sum::<f64>().abs() < 1e-10);
        }
        assert_eq!(a, generate_block_adjacency(&spec).unwrap());
    }

    #[test]
    fn invalid_block_spec() {
        for spec in [
            BlockAdjacencySpec {
                block_sizes: vec![],
                ..Default::default()
            },
            BlockAdjacencySpec {
                within_block_density: 0.0,
                ..Default::default()
            },
            BlockAdjacencySpec {
                weight_low: 2.0,
                ..Default::default()
            },
        ] {
            assert!(generate_block_adjacency(&spec).is_err());
        }
    }
}

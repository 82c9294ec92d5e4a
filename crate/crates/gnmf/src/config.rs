//! TOML experiment configuration.
//!
//! ```toml
//! schema = 1
//! repetitions = 10
//! output_dir = "out"
//!
//! [dataset]
//! kind = "synthetic"          # or "csv" with path, labels, adjacency
//!
//! [graph]
//! kind = "block"              # "knn", "supplied" or "none"
//!
//! [model]
//! rank = 3
//! sparsity_k = 17
//! lambda = 1.0
//! variants = ["gnmf_l20", "nmf"]
//!
//! [solver]
//! algorithm = "acc_palm"
//! seed = 0
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file. Repetition `i` uses solver seed `solver.seed + i`.

use std::path::{Path, PathBuf};

use gnmf_core::datagen::{BlockAdjacencySpec, SyntheticSpec};
use gnmf_core::graph::{WeightScheme, DEFAULT_NEIGHBORS};
use gnmf_core::solver::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub dataset: DatasetConfig,
    pub graph: GraphConfig,
    pub model: ModelConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_repetitions() -> usize {
    10
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetConfig {
    Synthetic(SyntheticSpec),
    Csv(CsvDataset),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvDataset {
    pub path: PathBuf,
    #[serde(default)]
    pub labels: Option<PathBuf>,
    #[serde(default)]
    pub adjacency: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphConfig {
    Knn {
        #[serde(default = "default_neighbors")]
        neighbors: usize,
        #[serde(default)]
        scheme: WeightScheme,
    },
    /// Adjacency read from the dataset's `adjacency` file.
    Supplied,
    Block(BlockGraphConfig),
    /// No graph; only sensible together with `lambda = 0`.
    None,
}

fn default_neighbors() -> usize {
    DEFAULT_NEIGHBORS
}

/// Block adjacency whose block sizes default to the synthetic cluster sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockGraphConfig {
    pub block_sizes: Option<Vec<usize>>,
    pub within_block_density: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub seed: u64,
}

impl Default for BlockGraphConfig {
    fn default() -> Self {
        let d = BlockAdjacencySpec::default();
        Self {
            block_sizes: None,
            within_block_density: d.within_block_density,
            weight_low: d.weight_low,
            weight_high: d.weight_high,
            seed: d.seed,
        }
    }
}

impl BlockGraphConfig {
    pub fn to_spec(&self, default_blocks: Option<Vec<usize>>) -> Result<BlockAdjacencySpec> {
        let block_sizes = self.block_sizes.clone().or(default_blocks).ok_or_else(|| {
            Error::Config("graph.block_sizes is required unless the dataset is synthetic".into())
        })?;
        Ok(BlockAdjacencySpec {
            block_sizes,
            within_block_density: self.within_block_density,
            weight_low: self.weight_low,
            weight_high: self.weight_high,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub rank: usize,
    pub sparsity_k: usize,
    pub lambda: f64,
    /// Baseline grid to run. Empty means the configured model only.
    #[serde(default)]
    pub variants: Vec<Variant>,
}

/// Members of the baseline grid, obtained by switching off the graph term
/// (`lambda = 0`), the row budget (`sparsity_k = p`), or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Nmf,
    NmfL20,
    Gnmf,
    GnmfL20,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Nmf,
        Variant::NmfL20,
        Variant::Gnmf,
        Variant::GnmfL20,
    ];

    /// `(lambda, sparsity_k)` derived from the configured model.
    pub fn parameters(self, model: &ModelConfig, features: usize) -> (f64, usize) {
        match self {
            Variant::Nmf => (0.0, features),
            Variant::NmfL20 => (0.0, model.sparsity_k),
            Variant::Gnmf => (model.lambda, features),
            Variant::GnmfL20 => (model.lambda, model.sparsity_k),
        }
    }

    /// Grid member a parameter setting falls into.
    pub fn classify(lambda: f64, sparsity_k: usize, features: usize) -> Variant {
        match (lambda == 0.0, sparsity_k >= features) {
            (true, true) => Variant::Nmf,
            (true, false) => Variant::NmfL20,
            (false, true) => Variant::Gnmf,
            (false, false) => Variant::GnmfL20,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::Nmf => "NMF",
            Variant::NmfL20 => "NMF_l20",
            Variant::Gnmf => "GNMF",
            Variant::GnmfL20 => "GNMF_l20",
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads the file and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&io::read_text(path)?).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be positive".into()));
        }
        self.solver
            .validate()
            .map_err(|e| Error::Config(format!("solver: {e}")))?;
        if let DatasetConfig::Synthetic(spec) = &self.dataset {
            spec.validate()
                .map_err(|e| Error::Config(format!("dataset: {e}")))?;
        }
        let has_adjacency = matches!(&self.dataset, DatasetConfig::Csv(c) if c.adjacency.is_some());
        match &self.graph {
            GraphConfig::Supplied if !has_adjacency => {
                return Err(Error::Config(
                    "graph kind \"supplied\" needs dataset.adjacency".into(),
                ));
            }
            GraphConfig::Supplied => {}
            _ if has_adjacency => {
                return Err(Error::Config(
                    "dataset.adjacency is only used with graph kind \"supplied\"".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DatasetConfig::Csv(csv) = &mut self.dataset {
            join(&mut csv.path);
            csv.labels.as_mut().map(join);
            csv.adjacency.as_mut().map(join);
        }
        join(&mut self.output_dir);
    }
}

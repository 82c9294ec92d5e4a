//! Repeated solver runs, clustering evaluation and result files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use gnmf_core::datagen::{self, generate_block_adjacency, try_generate_synthetic};
use gnmf_core::graph::GraphModel;
use gnmf_core::metrics::{self, MetricReport, DEFAULT_RESTARTS};
use gnmf_core::objective::ProblemSpec;
use gnmf_core::prox::nonzero_rows;
use gnmf_core::solver::{self, ConvergenceTrace, Monitor};
use gnmf_core::DenseMatrix;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{DatasetConfig, ExperimentConfig, GraphConfig, Variant};
use crate::error::{Error, Result};
use crate::io;

pub const AGGREGATE_FILE: &str = "aggregate.json";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const TRACE_DIR: &str = "traces";

/// Fills in `elapsed_s` from a wall clock started at construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Monitor for WallClock {
    fn elapsed_seconds(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub config_fingerprint: String,
    pub variant: &'static str,
    pub repetition: usize,
    pub seed: u64,
    pub lambda: f64,
    pub sparsity_k: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_objective: f64,
    /// Nonzero rows of the final `W`.
    pub selected_features: usize,
    pub metrics: MetricReport,
    /// Reported under `timing` in the aggregate, never next to the results.
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// Mean or standard deviation of each metric over one variant's runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acc: Option<f64>,
    pub relative_error: Option<f64>,
    pub iterations: Option<f64>,
    pub final_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub started_unix_s: u64,
    pub total_wall_s: f64,
    pub per_run_wall_s: Vec<f64>,
}

/// Everything written to `aggregate.json`. `timing` is the only field that
/// changes between identical invocations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub schema: u32,
    pub config_fingerprint: String,
    pub per_run: Vec<RunRecord>,
    pub mean: BTreeMap<&'static str, MetricSummary>,
    pub std: BTreeMap<&'static str, MetricSummary>,
    pub timing: Timing,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub aggregate: Aggregate,
    /// Same order as `aggregate.per_run`.
    pub traces: Vec<ConvergenceTrace>,
}

/// Dataset, graph and run grid, checked before any solve starts.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub x: DenseMatrix,
    pub labels: Option<Vec<usize>>,
    pub graph: GraphModel,
    pub variants: Vec<(Variant, ProblemSpec)>,
}

/// SHA-256 of the config as canonical JSON, leaving out `output_dir`.
pub fn config_fingerprint(config: &ExperimentConfig) -> Result<String> {
    let mut canonical = config.clone();
    canonical.output_dir = PathBuf::new();
    let bytes = serde_json::to_vec(&canonical)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn preflight(context: &str) -> impl Fn(gnmf_core::Error) -> Error + '_ {
    move |e| Error::Config(format!("{context}: {e}"))
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let (x, labels, default_blocks) = match &config.dataset {
        DatasetConfig::Synthetic(spec) => {
            let (x, labels) = try_generate_synthetic(spec).map_err(preflight("dataset"))?;
            (x, Some(labels), Some(datagen::blocks_for(spec)))
        }
        DatasetConfig::Csv(csv) => {
            let x = io::load_csv_matrix(&csv.path)?;
            let labels = csv.labels.as_deref().map(io::load_labels).transpose()?;
            (x, labels, None)
        }
    };
    let n = x.cols();
    if let Some(labels) = &labels {
        if labels.len() != n {
            return Err(Error::Config(format!(
                "label file has {} entries but the data has {n} samples",
                labels.len()
            )));
        }
    }

    let graph = match &config.graph {
        GraphConfig::Knn { neighbors, scheme } => {
            GraphModel::build_knn_graph(&x, *neighbors, *scheme).map_err(preflight("graph"))?
        }
        GraphConfig::Supplied => {
            let DatasetConfig::Csv(csv) = &config.dataset else {
                unreachable!("validated")
            };
            let path = csv.adjacency.as_deref().expect("validated");
            GraphModel::from_adjacency(io::load_csv_table(path)?).map_err(preflight("graph"))?
        }
        GraphConfig::Block(block) => {
            let spec = block.to_spec(default_blocks)?;
            let a = generate_block_adjacency(&spec).map_err(preflight("graph"))?;
            GraphModel::from_adjacency(a).map_err(preflight("graph"))?
        }
        GraphConfig::None => GraphModel::empty(n),
    };

    let model = &config.model;
    let base = ProblemSpec::new(
        x.clone(),
        model.rank,
        model.sparsity_k,
        model.lambda,
        graph.clone(),
    )
    .map_err(preflight("model"))?;
    let p = x.rows();
    let variants = if model.variants.is_empty() {
        vec![(Variant::classify(model.lambda, model.sparsity_k, p), base)]
    } else {
        let mut out = Vec::new();
        for &v in &model.variants {
            if out.iter().any(|(seen, _)| *seen == v) {
                return Err(Error::Config(format!("variant {} listed twice", v.label())));
            }
            let (lambda, k) = v.parameters(model, p);
            out.push((v, base.with_model(lambda, k).map_err(preflight("model"))?));
        }
        out
    };
    if matches!(config.graph, GraphConfig::None) && variants.iter().any(|(_, s)| s.lambda() > 0.0) {
        return Err(Error::Config("lambda > 0 needs a graph".into()));
    }
    Ok(Prepared {
        x,
        labels,
        graph,
        variants,
    })
}

fn cluster_count(labels: Option<&[usize]>, rank: usize) -> usize {
    match labels {
        Some(l) => {
            let mut distinct = l.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        }
        None => rank,
    }
}

/// Solves one repetition and scores it.
pub fn run_single(
    spec: &ProblemSpec,
    config: &ExperimentConfig,
    labels: Option<&[usize]>,
    repetition: usize,
) -> Result<(RunRecord, ConvergenceTrace)> {
    let seed = config.solver.seed + repetition as u64;
    let solver_config = solver::SolverConfig {
        seed,
        ..config.solver.clone()
    };
    let mut clock = WallClock::start();
    let out = solver::solve_monitored(spec, &solver_config, &mut clock)?;
    let wall_time_s = clock.elapsed_seconds();

    let relative_error = metrics::relative_error(spec.x(), &out.w, &out.h)?;
    let (nmi, acc) = match labels {
        Some(labels) => {
            let k = cluster_count(Some(labels), spec.rank());
            let clustering = metrics::kmeans(&out.h.transpose(), k, seed, DEFAULT_RESTARTS)?;
            (
                Some(metrics::nmi(&clustering.labels, labels)?),
                Some(metrics::acc(&clustering.labels, labels)?),
            )
        }
        None => (None, None),
    };
    let record = RunRecord {
        config_fingerprint: String::new(),
        variant: Variant::classify(spec.lambda(), spec.sparsity_k(), spec.features()).label(),
        repetition,
        seed,
        lambda: spec.lambda(),
        sparsity_k: spec.sparsity_k(),
        iterations: out.trace.iterations(),
        converged: out.trace.converged,
        final_objective: out.trace.final_objective(),
        selected_features: nonzero_rows(&out.w),
        metrics: MetricReport {
            nmi,
            acc,
            relative_error,
        },
        wall_time_s,
    };
    Ok((record, out.trace))
}

/// Runs every variant `repetitions` times. Runs execute in parallel but
/// results keep the order (variant, repetition).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started_unix_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let fingerprint = config_fingerprint(config)?;
    let prepared = prepare(config)?;
    let labels = prepared.labels.as_deref();

    let jobs: Vec<(&ProblemSpec, usize)> = prepared
        .variants
        .iter()
        .flat_map(|(_, spec)| (0..config.repetitions).map(move |rep| (spec, rep)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(spec, rep)| run_single(spec, config, labels, rep))
        .collect::<Result<Vec<_>>>()?;

    let (mut per_run, traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    for r in &mut per_run {
        r.config_fingerprint.clone_from(&fingerprint);
    }
    let mut mean = BTreeMap::new();
    let mut std = BTreeMap::new();
    for (variant, _) in &prepared.variants {
        let label = variant.label();
        let runs: Vec<&RunRecord> = per_run.iter().filter(|r| r.variant == label).collect();
        let (m, s) = summarize(&runs);
        mean.insert(label, m);
        std.insert(label, s);
    }
    let timing = Timing {
        started_unix_s,
        total_wall_s: clock.elapsed().as_secs_f64(),
        per_run_wall_s: per_run.iter().map(|r| r.wall_time_s).collect(),
    };
    Ok(ExperimentReport {
        aggregate: Aggregate {
            schema: crate::config::SCHEMA_VERSION,
            config_fingerprint: fingerprint,
            per_run,
            mean,
            std,
            timing,
        },
        traces,
    })
}

/// Sample mean and standard deviation (n − 1 denominator). The deviation is
/// left out when there is a single run; a metric is left out when any run
/// lacks it.
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (Some(mean), Some(var.sqrt()))
}

fn summarize(runs: &[&RunRecord]) -> (MetricSummary, MetricSummary) {
    let column = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> (Option<f64>, Option<f64>) {
        let values: Option<Vec<f64>> = runs.iter().map(|r| f(r)).collect();
        values.map_or((None, None), |v| mean_std(&v))
    };
    let nmi = column(&|r| r.metrics.nmi);
    let acc = column(&|r| r.metrics.acc);
    let rel = column(&|r| Some(r.metrics.relative_error));
    let iters = column(&|r| Some(r.iterations as f64));
    let obj = column(&|r| Some(r.final_objective));
    (
        MetricSummary {
            nmi: nmi.0,
            acc: acc.0,
            relative_error: rel.0,
            iterations: iters.0,
            final_objective: obj.0,
        },
        MetricSummary {
            nmi: nmi.1,
            acc: acc.1,
            relative_error: rel.1,
            iterations: iters.1,
            final_objective: obj.1,
        },
    )
}

pub fn trace_file_name(record: &RunRecord) -> String {
    format!("{}_rep{:03}.csv", record.variant, record.repetition)
}

/// Human-readable table, one row per variant.
pub fn format_summary(aggregate: &Aggregate) -> String {
    fn cell(mean: Option<f64>, std: Option<f64>) -> String {
        match (mean, std) {
            (Some(m), Some(s)) => format!("{m:.4} ± {s:.4}"),
            (Some(m), None) => format!("{m:.4}"),
            _ => "-".to_string(),
        }
    }
    let mut out = String::new();
    writeln!(
        out,
        "{:<10} {:>4}  {:>17}  {:>17}  {:>17}  {:>19}  {:>21}",
        "variant", "runs", "NMI", "ACC", "rel. error", "iterations", "objective"
    )
    .unwrap();
    for (label, m) in &aggregate.mean {
        let s = &aggregate.std[label];
        let runs = aggregate
            .per_run
            .iter()
            .filter(|r| r.variant == *label)
            .count();
        writeln!(
            out,
            "{:<10} {:>4}  {:>17}  {:>17}  {:>17}  {:>19}  {:>21}",
            label,
            runs,
            cell(m.nmi, s.nmi),
            cell(m.acc, s.acc),
            cell(m.relative_error, s.relative_error),
            cell(m.iterations, s.iterations),
            cell(m.final_objective, s.final_objective),
        )
        .unwrap();
    }
    out
}

/// Writes `aggregate.json`, `summary.txt` and one trace CSV per run.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    let trace_dir = dir.join(TRACE_DIR);
    for (record, trace) in report.aggregate.per_run.iter().zip(&report.traces) {
        io::write_trace_csv(&trace_dir.join(trace_file_name(record)), trace)?;
    }
    let mut json = serde_json::to_string_pretty(&report.aggregate)?;
    json.push('\n');
    io::write_text(&dir.join(AGGREGATE_FILE), &json)?;
    io::write_text(&dir.join(SUMMARY_FILE), &format_summary(&report.aggregate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_statistics() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, Some(2.5));
        // sum of squared deviations 5, over n − 1 = 3
        assert!((s.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[7.0]), (Some(7.0), None));
        assert_eq!(mean_std(&[]), (None, None));
    }

    #[test]
    fn cluster_count_uses_distinct_labels() {
        assert_eq!(cluster_count(Some(&[4, 4, 9, 0]), 2), 3);
        assert_eq!(cluster_count(None, 2), 2);
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gnmf::config::ExperimentConfig;
use gnmf::experiment::{self, mean_std};
use gnmf::io;
use gnmf_core::datagen::{generate_synthetic, SyntheticSpec};

fn gnmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnmf"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn small_synthetic_config(extra_model: &str, repetitions: usize) -> String {
    format!(
        r#"
schema = 1
repetitions = {repetitions}
output_dir = "out"

[dataset]
kind = "synthetic"
samples_per_cluster = 10
signal_features = 6
noise_rows = 2
means = [-2.0, 2.0]

[graph]
kind = "knn"
neighbors = 3

[model]
rank = 2
{extra_model}

[solver]
max_iter = 200
"#
    )
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = gnmf(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).to_lowercase().contains("usage"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn missing_data_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        r#"
schema = 1
[dataset]
kind = "csv"
path = "nowhere/data.csv"
[graph]
kind = "none"
[model]
rank = 2
sparsity_k = 2
lambda = 0.0
"#,
    )
    .unwrap();
    let out = gnmf(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("nowhere/data.csv"),
        "{}",
        stderr(&out)
    );
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_file_fails() {
    let out = gnmf(&["run", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/definitely/not/here.toml"));
}

#[test]
fn invalid_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        small_synthetic_config("sparsity_k = 99\nlambda = 1.0", 1),
    )
    .unwrap();
    let out = gnmf(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sparsity_k"), "{}", stderr(&out));
}

#[test]
fn gen_synthetic_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(
        &spec,
        "samples_per_cluster = 7\nmeans = [0.0, 3.0]\nseed = 4\n",
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let labels = dir.path().join("labels.txt");
    for (out, extra) in [(&a, Some(&labels)), (&b, None)] {
        let mut args = vec![
            "gen-synthetic",
            spec.to_str().unwrap(),
            out.to_str().unwrap(),
        ];
        if let Some(l) = extra {
            args.extend(["--labels", l.to_str().unwrap()]);
        }
        assert!(gnmf(&args).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let expected = generate_synthetic(&SyntheticSpec {
        samples_per_cluster: 7,
        means: vec![0.0, 3.0],
        seed: 4,
        ..SyntheticSpec::default()
    });
    assert_eq!(io::load_csv_matrix(&a).unwrap(), expected.0);
    assert_eq!(io::load_labels(&labels).unwrap(), expected.1);
}

#[test]
fn gen_synthetic_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(&spec, "clusters = 3\n").unwrap();
    let out = gnmf(&["gen-synthetic", spec.to_str().unwrap(), "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn single_repetition_run_and_trace_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        small_synthetic_config("sparsity_k = 8\nlambda = 0.0", 1),
    )
    .unwrap();
    let out = gnmf(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out_dir = dir.path().join("out");
    let traces: Vec<_> = fs::read_dir(out_dir.join(experiment::TRACE_DIR))
        .unwrap()
        .collect();
    assert_eq!(traces.len(), 1);
    let json: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(out_dir.join(experiment::AGGREGATE_FILE)).unwrap(),
    )
    .unwrap();
    let runs = json["per_run"].as_array().unwrap();
    assert_eq!(runs.len(), 1);
    // no graph term and no row budget: the plain NMF baseline
    assert_eq!(runs[0]["variant"], "NMF");
    assert!(json["std"]["NMF"]["relative_error"].is_null());
    let summary = fs::read_to_string(out_dir.join(experiment::SUMMARY_FILE)).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("NMF "));

    let trace = out_dir.join(experiment::TRACE_DIR).join("NMF_rep000.csv");
    let text = fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().next().unwrap(), io::TRACE_HEADER);
    let plot = dir.path().join("plot.csv");
    assert!(gnmf(&[
        "trace-plot-data",
        trace.to_str().unwrap(),
        plot.to_str().unwrap()
    ])
    .status
    .success());
    let plot_text = fs::read_to_string(&plot).unwrap();
    assert_eq!(plot_text.lines().next(), Some("iteration,objective"));
    assert_eq!(plot_text.lines().count(), text.lines().count());
    let iterations = runs[0]["iterations"].as_u64().unwrap() as usize;
    assert_eq!(plot_text.lines().count(), iterations + 1);
}

#[test]
fn trace_plot_data_rejects_other_files() {
    let dir = tempfile::tempdir().unwrap();
    let bogus = dir.path().join("bogus.csv");
    fs::write(&bogus, "1,2\n").unwrap();
    let out = gnmf(&["trace-plot-data", bogus.to_str().unwrap(), "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bogus.csv:1:"));
}

#[test]
fn aggregate_matches_direct_recomputation() {
    let cfg = ExperimentConfig::from_toml(&small_synthetic_config(
        "sparsity_k = 6\nlambda = 0.5\nvariants = [\"gnmf_l20\", \"nmf_l20\", \"gnmf\", \"nmf\"]",
        4,
    ))
    .unwrap();
    let report = experiment::run_experiment(&cfg).unwrap();
    let agg = &report.aggregate;
    assert_eq!(agg.per_run.len(), 16);
    assert_eq!(report.traces.len(), 16);
    for label in ["GNMF_l20", "NMF_l20", "GNMF", "NMF"] {
        let runs: Vec<_> = agg.per_run.iter().filter(|r| r.variant == label).collect();
        assert_eq!(runs.len(), 4);
        let seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![0, 1, 2, 3]);

        let nmi: Vec<f64> = runs.iter().map(|r| r.metrics.nmi.unwrap()).collect();
        let n = nmi.len() as f64;
        let mean = nmi.iter().sum::<f64>() / n;
        let std = (nmi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((agg.mean[label].nmi.unwrap() - mean).abs() < 1e-12);
        assert!((agg.std[label].nmi.unwrap() - std).abs() < 1e-12);
        let rel: Vec<f64> = runs.iter().map(|r| r.metrics.relative_error).collect();
        assert_eq!(mean_std(&rel).0, agg.mean[label].relative_error);

        for r in &runs {
            assert!(r.iterations <= cfg.solver.max_iter);
            assert!(r.metrics.relative_error.is_finite());
            assert_eq!(r.config_fingerprint, agg.config_fingerprint);
        }
    }
    let row_budget = agg.per_run.iter().filter(|r| r.variant.ends_with("_l20"));
    assert!(row_budget.clone().all(|r| r.selected_features <= 6));
    assert!(row_budget.clone().all(|r| r.sparsity_k == 6));
}

#[test]
fn csv_dataset_with_supplied_graph() {
    let dir = tempfile::tempdir().unwrap();
    let (x, labels) = generate_synthetic(&SyntheticSpec {
        samples_per_cluster: 8,
        signal_features: 5,
        noise_rows: 1,
        means: vec![-2.0, 2.0],
        seed: 1,
    });
    io::write_csv_matrix(&dir.path().join("x.csv"), &x).unwrap();
    io::write_labels(&dir.path().join("y.txt"), &labels).unwrap();
    let adjacency = gnmf_core::DenseMatrix::from_fn(16, 16, |j, l| {
        if j != l && labels[j] == labels[l] {
            1.0
        } else {
            0.0
        }
    });
    io::write_csv_matrix(&dir.path().join("a.csv"), &adjacency).unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(
        &cfg_path,
        r#"
schema = 1
repetitions = 2
[dataset]
kind = "csv"
path = "x.csv"
labels = "y.txt"
adjacency = "a.csv"
[graph]
kind = "supplied"
[model]
rank = 2
sparsity_k = 5
lambda = 1.0
"#,
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let report = experiment::run_experiment(&cfg).unwrap();
    for r in &report.aggregate.per_run {
        assert_eq!(r.variant, "GNMF_l20");
        assert_eq!(r.metrics.nmi, Some(1.0));
    }

    // labels are optional; metrics that need them are then omitted
    let no_labels = fs::read_to_string(&cfg_path)
        .unwrap()
        .replace("labels = \"y.txt\"\n", "");
    fs::write(&cfg_path, no_labels).unwrap();
    let report = experiment::run_experiment(&ExperimentConfig::load(&cfg_path).unwrap()).unwrap();
    assert!(report
        .aggregate
        .per_run
        .iter()
        .all(|r| r.metrics.nmi.is_none()));
    experiment::write_report(&report, &dir.path().join("out")).unwrap();
    let json = fs::read_to_string(dir.path().join("out").join(experiment::AGGREGATE_FILE)).unwrap();
    assert!(!json.contains("\"nmi\""));
}

#[test]
fn label_count_must_match_samples() {
    let dir = tempfile::tempdir().unwrap();
    io::write_csv_matrix(
        &dir.path().join("x.csv"),
        &gnmf_core::DenseMatrix::from_fn(3, 4, |i, j| (i + j) as f64),
    )
    .unwrap();
    io::write_labels(&dir.path().join("y.txt"), &[0, 1, 0]).unwrap();
    let cfg = format!(
        "schema = 1\n[dataset]\nkind = \"csv\"\npath = \"{0}/x.csv\"\nlabels = \"{0}/y.txt\"\n[graph]\nkind = \"none\"\n[model]\nrank = 1\nsparsity_k = 3\nlambda = 0.0\n",
        dir.path().display()
    );
    let err = experiment::run_experiment(&ExperimentConfig::from_toml(&cfg).unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("3 entries"));
}

#[test]
fn generated_matrix_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (x, _) = generate_synthetic(&SyntheticSpec::default());
    let path = dir.path().join("x.csv");
    io::write_csv_matrix(&path, &x).unwrap();
    let back = io::load_csv_matrix(&path).unwrap();
    assert!(back.distance_sq(&x).unwrap().sqrt() <= 1e-12);
    assert_eq!(back, x);
}

#[test]
fn bundled_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml");
    let cfg = ExperimentConfig::load(&path).unwrap();
    assert_eq!(cfg.repetitions, 10);
    assert_eq!(cfg.model.variants.len(), 2);
}

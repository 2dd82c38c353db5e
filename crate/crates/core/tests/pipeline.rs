use std::path::PathBuf;

use fairsample::data::{ingest_csv, partition_subgroups, CellCounts};
use fairsample::experiment::{
    emit, imbalance_sweep, run_experiment, DataSource, ExperimentConfig, ExperimentError, Format, Report,
    RunReport, SynthConfig, RUN_CSV_HEADER, SWEEP_CSV_HEADER,
};
use fairsample::oversample::Preprocessor;
use fairsample::Execution;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn synthetic(counts: CellCounts, preprocessor: Preprocessor) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        DataSource::Synthetic(SynthConfig { counts, seed: 3, ..SynthConfig::default() }),
        preprocessor,
    );
    cfg.seed = 11;
    cfg.classifier.epochs = 150;
    cfg
}

fn json(r: &Report) -> Vec<u8> {
    let mut buf = Vec::new();
    emit(r, Format::Json, &mut buf).unwrap();
    buf
}

#[test]
fn german_ingest_cell_counts() {
    let cfg = ExperimentConfig::load(configs().join("german_none.toml")).unwrap();
    let DataSource::Csv { path, schema } = &cfg.dataset else { panic!("csv config expected") };
    let ingested = ingest_csv(path, schema).unwrap();
    assert_eq!(ingested.dropped_rows, 0);
    let d = ingested.dataset;
    assert_eq!(d.n_rows(), 1000);
    assert_eq!(d.labels().iter().filter(|&&y| y == 1).count(), 700);
    assert_eq!(partition_subgroups(&d).counts(), CellCounts::new(499, 201, 191, 109));
}

#[test]
fn reports_are_byte_identical_and_mode_independent() {
    let cfg = synthetic(CellCounts::new(120, 60, 40, 20), Preprocessor::Fos);
    let a = run_experiment(&cfg, Execution::Parallel).unwrap();
    let b = run_experiment(&cfg, Execution::Parallel).unwrap();
    let c = run_experiment(&cfg, Execution::Sequential).unwrap();
    assert_eq!(json(&Report::Run(a.clone())), json(&Report::Run(b)));
    assert_eq!(json(&Report::Run(a)), json(&Report::Run(c)));
}

#[test]
fn means_are_exact_and_fos_balances_every_fold() {
    let r = run_experiment(&synthetic(CellCounts::new(120, 60, 40, 20), Preprocessor::Fos), Execution::default())
        .unwrap();
    assert_eq!(r.folds.len(), 5);
    let mean = |f: fn(&fairsample::experiment::FoldReport) -> f64| r.folds.iter().map(f).sum::<f64>() / 5.0;
    assert_eq!(r.mean.ba, mean(|f| f.metrics.ba));
    assert_eq!(r.mean.aod, mean(|f| f.metrics.aod));
    assert_eq!(r.mean.fair_utility, mean(|f| f.metrics.fair_utility));
    assert_eq!(r.mean.f1, mean(|f| f.f1));
    for f in &r.folds {
        assert_eq!(f.counts_after.prmin, f.counts_after.prmaj);
        assert_eq!(f.counts_after.upmin, f.counts_after.upmaj);
        assert_eq!(f.n_train, f.counts_after.total());
        assert_eq!(f.synthetic_rows, f.counts_after.total() - f.counts_before.total());
        assert!(f.timings.is_none());
    }
}

#[test]
fn fos_on_cell_balanced_data_equals_baseline() {
    let counts = CellCounts::new(150, 100, 150, 100);
    let base = run_experiment(&synthetic(counts, Preprocessor::None), Execution::default()).unwrap();
    let treated = run_experiment(&synthetic(counts, Preprocessor::Fos), Execution::default()).unwrap();
    assert!(treated.folds.iter().all(|f| f.synthetic_rows == 0));
    assert_eq!(base.folds, treated.folds);
    assert_eq!(base.mean, treated.mean);
}

#[test]
fn json_round_trip_and_csv_headers() {
    let mut cfg = synthetic(CellCounts::new(80, 40, 30, 20), Preprocessor::Smote);
    let run = run_experiment(&cfg, Execution::default()).unwrap();
    let text = json(&Report::Run(run.clone()));
    let back: RunReport = serde_json::from_slice(&text).unwrap();
    assert_eq!(back, run);

    let mut csv = Vec::new();
    emit(&Report::Run(run), Format::Csv, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], RUN_CSV_HEADER);
    assert_eq!(lines.len(), 1 + 5 + 1);
    assert!(lines[6].starts_with("mean,,,,"));
    let ba = lines[1].split(',').nth(4).unwrap();
    assert_eq!(ba.split('.').nth(1).unwrap().len(), 4);

    cfg.sweep_levels = Some(vec![1.0, 2.0]);
    let sweep = imbalance_sweep(&cfg, Execution::default()).unwrap();
    let mut csv = Vec::new();
    emit(&Report::Sweep(sweep), Format::Csv, &mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with(&format!("{SWEEP_CSV_HEADER}\n1.0000,ok,")));
}

#[test]
fn unit_level_of_sweep_reproduces_run() {
    let mut cfg = synthetic(CellCounts::new(120, 60, 40, 20), Preprocessor::Fos);
    let run = run_experiment(&cfg, Execution::default()).unwrap();
    cfg.sweep_levels = Some(vec![1.0, 2.0, 4.0]);
    let sweep = imbalance_sweep(&cfg, Execution::default()).unwrap();
    let first = sweep.points[0].report.as_ref().unwrap();
    assert_eq!(first.folds, run.folds);
    assert_eq!(first.mean, run.mean);
    for p in &sweep.points {
        for f in &p.report.as_ref().unwrap().folds {
            assert_eq!((f.counts_after.prmin, f.counts_after.upmin), (f.counts_after.prmaj, f.counts_after.upmaj));
        }
    }
}

#[test]
fn baseline_minority_recall_non_increasing_over_sweep() {
    let cfg = ExperimentConfig::load(configs().join("synthetic_sweep.toml")).unwrap();
    let sweep = imbalance_sweep(&cfg, Execution::default()).unwrap();
    let recall: Vec<f64> = sweep.curves.iter().map(|c| c.minority_recall).collect();
    assert_eq!(recall.len(), 3);
    assert!(recall.windows(2).all(|w| w[1] <= w[0]), "{recall:?}");
}

#[test]
fn degenerate_level_is_skipped_and_flagged() {
    let mut cfg = synthetic(CellCounts::new(100, 60, 40, 10), Preprocessor::None);
    cfg.sweep_levels = Some(vec![1.0, 2.0, 50.0]);
    let sweep = imbalance_sweep(&cfg, Execution::default()).unwrap();
    assert!(sweep.points[0].skipped.is_none() && sweep.points[1].skipped.is_none());
    assert!(sweep.points[2].skipped.as_deref().unwrap().contains("leaves none"));
    assert_eq!(sweep.curves.len(), 2);
}

#[test]
fn failing_fold_fails_the_run() {
    // reweigh needs every cell; this dataset has no unprivileged minority rows
    let cfg = synthetic(CellCounts::new(100, 60, 40, 0), Preprocessor::Reweigh);
    let err = run_experiment(&cfg, Execution::default()).unwrap_err();
    assert!(matches!(err, ExperimentError::FoldsFailed(ref f) if f.len() == 5), "{err}");
    assert_eq!(err.kind(), "fold_failed");
}

#[test]
fn timings_are_opt_in() {
    let mut cfg = synthetic(CellCounts::new(60, 30, 20, 10), Preprocessor::Ros);
    cfg.record_timings = true;
    let r = run_experiment(&cfg, Execution::default()).unwrap();
    assert!(r.folds.iter().all(|f| f.timings.is_some_and(|t| t.train >= 0.0)));
}

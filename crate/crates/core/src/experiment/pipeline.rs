use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig};
use super::{synth, ExperimentError, SCHEMA_VERSION};
use crate::data::{
    downsample_to_level, ingest_csv, minority_label, partition_subgroups, standardize_apply, standardize_fit,
    stratified_kfold, CellCounts, Dataset, FoldPlan,
};
use crate::linear::{feature_importance, train, Importance};
use crate::metrics::{confusion_by_group, fairness_report, FairnessReport, GroupConfusion};
use crate::oversample::Preprocessor;
use crate::{seed, Execution};

/// Dataset loaded from a config's source.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset,
    pub dropped_rows: usize,
}

pub fn load_dataset(source: &DataSource) -> Result<LoadedData, ExperimentError> {
    match source {
        DataSource::Csv { path, schema } => {
            let ingested = ingest_csv(path, schema)?;
            Ok(LoadedData { dataset: ingested.dataset, dropped_rows: ingested.dropped_rows })
        }
        DataSource::Synthetic(cfg) => Ok(LoadedData { dataset: synth::generate(cfg)?, dropped_rows: 0 }),
    }
}

/// Wall-clock seconds per stage of one fold.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub downsample: f64,
    pub scale: f64,
    pub preprocess: f64,
    pub train: f64,
    pub evaluate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_validation: usize,
    /// Training cells after downsampling, before preprocessing.
    pub counts_before: CellCounts,
    pub counts_after: CellCounts,
    pub synthetic_rows: usize,
    pub metrics: FairnessReport,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Recall of the full dataset's minority label.
    pub minority_recall: f64,
    pub confusion: GroupConfusion,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

/// Arithmetic means of the per-fold values (signed differences are
/// averaged signed).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub ba: f64,
    pub aod: f64,
    pub aao: f64,
    pub eod: f64,
    pub tnrd: f64,
    pub tprd: f64,
    pub fprd: f64,
    pub fair_utility: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub minority_recall: f64,
}

impl MeanMetrics {
    pub fn of(folds: &[FoldReport]) -> MeanMetrics {
        let n = folds.len() as f64;
        let mean = |f: fn(&FoldReport) -> f64| folds.iter().map(f).sum::<f64>() / n;
        MeanMetrics {
            ba: mean(|r| r.metrics.ba),
            aod: mean(|r| r.metrics.aod),
            aao: mean(|r| r.metrics.aao),
            eod: mean(|r| r.metrics.eod),
            tnrd: mean(|r| r.metrics.tnrd),
            tprd: mean(|r| r.metrics.tprd),
            fprd: mean(|r| r.metrics.fprd),
            fair_utility: mean(|r| r.metrics.fair_utility),
            precision: mean(|r| r.precision),
            recall: mean(|r| r.recall),
            f1: mean(|r| r.f1),
            minority_recall: mean(|r| r.minority_recall),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// Imbalance level applied to each training portion (1 = untouched).
    pub level: f64,
    pub dropped_rows: usize,
    /// Cells of the full dataset.
    pub counts: CellCounts,
    pub folds: Vec<FoldReport>,
    pub mean: MeanMetrics,
    pub degenerate_folds: usize,
}

/// Original-row ids that reached each stage of one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAudit {
    pub fold: usize,
    pub validation: HashSet<u32>,
    pub scaler_fit: HashSet<u32>,
    pub preprocess_input: HashSet<u32>,
    /// Sources of every training row, synthetic rows included.
    pub training: HashSet<u32>,
}

impl FoldAudit {
    /// Number of (stage, id) pairs where a validation id was used.
    pub fn violations(&self) -> usize {
        [&self.scaler_fit, &self.preprocess_input, &self.training]
            .iter()
            .map(|stage| stage.intersection(&self.validation).count())
            .sum()
    }
}

fn ids(d: &Dataset) -> HashSet<u32> {
    d.origins().iter().flat_map(|o| o.sources().iter().copied()).collect()
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    data: &'a Dataset,
    plan: &'a FoldPlan,
    minority: u8,
    execution: Execution,
}

fn run_fold(ctx: &Context<'_>, fold: usize, level: f64) -> Result<(FoldReport, FoldAudit), String> {
    let cfg = ctx.cfg;
    let clock = |t: Instant| t.elapsed().as_secs_f64();
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let train_raw = ctx.data.subset(&ctx.plan.training(fold));
    let val_raw = ctx.data.subset(ctx.plan.validation(fold));
    let train_raw = downsample_to_level(
        &train_raw,
        level,
        seed::derive(cfg.seed, &[seed::tag::DOWNSAMPLE, fold as u64]),
        cfg.flags.sweep_removal,
    )
    .map_err(|e| e.to_string())?;
    timings.downsample = clock(t);

    let t = Instant::now();
    let scaler = standardize_fit(&train_raw, &train_raw.continuous_columns());
    let train_scaled = standardize_apply(&train_raw, &scaler);
    let val = standardize_apply(&val_raw, &scaler);
    timings.scale = clock(t);

    let t = Instant::now();
    let counts_before = partition_subgroups(&train_scaled).counts();
    let outcome = cfg
        .preprocessor
        .apply(
            &train_scaled,
            &cfg.oversample_config(ctx.execution),
            seed::derive(cfg.seed, &[seed::tag::PREPROCESS, fold as u64]),
        )
        .map_err(|e| e.to_string())?;
    let counts_after = partition_subgroups(&outcome.dataset).counts();
    timings.preprocess = clock(t);

    let t = Instant::now();
    let (train_set, val_set) = match (cfg.flags.drop_protected_feature, outcome.dataset.protected_column()) {
        (true, Some(pc)) => (outcome.dataset.drop_column(pc), val.drop_column(pc)),
        _ => (outcome.dataset.clone(), val.clone()),
    };
    let model = train(&train_set, cfg.classifier.kind, &cfg.classifier.hyper(cfg.seed)).map_err(|e| e.to_string())?;
    timings.train = clock(t);

    let t = Instant::now();
    let predictions = model.predict(val_set.features()).map_err(|e| e.to_string())?;
    let confusion =
        confusion_by_group(val.labels(), &predictions, val.protected()).map_err(|e| e.to_string())?;
    let pooled = confusion.pooled().rates();
    let minority_recall = if ctx.minority == 1 { pooled.tpr } else { pooled.tnr };
    timings.evaluate = clock(t);

    let report = FoldReport {
        fold,
        n_train: outcome.dataset.n_rows(),
        n_validation: val.n_rows(),
        counts_before,
        counts_after,
        synthetic_rows: outcome.synthetic_rows(),
        metrics: fairness_report(&confusion),
        precision: pooled.precision,
        recall: pooled.recall,
        f1: pooled.f1,
        minority_recall,
        confusion,
        warnings: outcome.warnings,
        timings: cfg.record_timings.then_some(timings),
    };
    let audit = FoldAudit {
        fold,
        validation: ids(&val_raw),
        scaler_fit: ids(&train_raw),
        preprocess_input: ids(&train_scaled),
        training: ids(&train_set),
    };
    Ok((report, audit))
}

fn run_level(
    cfg: &ExperimentConfig,
    loaded: &LoadedData,
    level: f64,
    execution: Execution,
) -> Result<(RunReport, Vec<FoldAudit>), ExperimentError> {
    let data = &loaded.dataset;
    let plan = stratified_kfold(data, cfg.cv_k, cfg.seed)?;
    let ctx = Context { cfg, data, plan: &plan, minority: minority_label(data.labels()), execution };
    let results = execution.map_range(cfg.cv_k, |fold| run_fold(&ctx, fold, level));
    let mut folds = Vec::with_capacity(cfg.cv_k);
    let mut audits = Vec::with_capacity(cfg.cv_k);
    let mut failures = Vec::new();
    for (fold, r) in results.into_iter().enumerate() {
        match r {
            Ok((report, audit)) => {
                folds.push(report);
                audits.push(audit);
            }
            Err(reason) => failures.push(FoldFailure { fold, reason }),
        }
    }
    if !failures.is_empty() {
        return Err(ExperimentError::FoldsFailed(failures));
    }
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        level,
        dropped_rows: loaded.dropped_rows,
        counts: partition_subgroups(data).counts(),
        mean: MeanMetrics::of(&folds),
        degenerate_folds: folds.iter().filter(|f| f.metrics.degenerate).count(),
        folds,
    };
    Ok((report, audits))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldFailure {
    pub fold: usize,
    pub reason: String,
}

/// Cross-validated run: per fold, fit the scaler on the training portion,
/// preprocess the training portion only, train, and evaluate on the
/// untouched validation fold.
pub fn run_experiment(cfg: &ExperimentConfig, execution: Execution) -> Result<RunReport, ExperimentError> {
    run_experiment_audited(cfg, execution).map(|(r, _)| r)
}

/// [`run_experiment`] plus the per-fold provenance audit.
pub fn run_experiment_audited(
    cfg: &ExperimentConfig,
    execution: Execution,
) -> Result<(RunReport, Vec<FoldAudit>), ExperimentError> {
    run_experiment_at_level(cfg, 1.0, execution)
}

/// One sweep point with its audit: every training portion is downsampled
/// to `level` before scaling and preprocessing.
pub fn run_experiment_at_level(
    cfg: &ExperimentConfig,
    level: f64,
    execution: Execution,
) -> Result<(RunReport, Vec<FoldAudit>), ExperimentError> {
    cfg.validate()?;
    let loaded = load_dataset(&cfg.dataset)?;
    run_level(cfg, &loaded, level, execution)
}

/// Per-level means, the panel set of an imbalance sweep plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub level: f64,
    pub ba: f64,
    pub aao: f64,
    pub eod: f64,
    pub fair_utility: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub minority_recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub level: f64,
    /// Reason the level could not be run, if it was skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RunReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    pub curves: Vec<CurvePoint>,
}

/// Run the experiment once per configured imbalance level, downsampling
/// each training portion; validation folds are never downsampled.
pub fn imbalance_sweep(cfg: &ExperimentConfig, execution: Execution) -> Result<SweepReport, ExperimentError> {
    cfg.validate()?;
    let levels = cfg
        .sweep_levels
        .clone()
        .ok_or_else(|| ExperimentError::Config("sweep requires sweep_levels".into()))?;
    let loaded = load_dataset(&cfg.dataset)?;
    let results = execution.map_slice(&levels, |&level| run_level(cfg, &loaded, level, execution));
    let mut points = Vec::with_capacity(levels.len());
    for (&level, r) in levels.iter().zip(results) {
        match r {
            Ok((report, _)) => points.push(SweepPoint { level, skipped: None, report: Some(report) }),
            Err(ExperimentError::FoldsFailed(f)) => {
                let reason = super::describe(&f);
                log::warn!("skipping level {level}: {reason}");
                points.push(SweepPoint { level, skipped: Some(reason), report: None });
            }
            Err(e) => return Err(e),
        }
    }
    let curves = points
        .iter()
        .filter_map(|p| p.report.as_ref())
        .map(|r| CurvePoint {
            level: r.level,
            ba: r.mean.ba,
            aao: r.mean.aao,
            eod: r.mean.eod,
            fair_utility: r.mean.fair_utility,
            f1: r.mean.f1,
            precision: r.mean.precision,
            recall: r.mean.recall,
            minority_recall: r.mean.minority_recall,
        })
        .collect();
    Ok(SweepReport { schema_version: SCHEMA_VERSION, config: cfg.clone(), points, curves })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// Model trained on the unmodified (standardized) dataset.
    pub baseline: Vec<Importance>,
    /// Model trained after applying the configured preprocessor.
    pub treated: Vec<Importance>,
}

/// Train on the full dataset with and without the configured preprocessor
/// and rank features by normalized coefficient magnitude.
pub fn feature_importance_report(
    cfg: &ExperimentConfig,
    execution: Execution,
) -> Result<ImportanceReport, ExperimentError> {
    cfg.validate()?;
    let loaded = load_dataset(&cfg.dataset)?;
    let data = &loaded.dataset;
    let scaled = standardize_apply(data, &standardize_fit(data, &data.continuous_columns()));
    let hyper = cfg.classifier.hyper(cfg.seed);
    let rank = |preprocessor: Preprocessor| -> Result<Vec<Importance>, ExperimentError> {
        let outcome = preprocessor.apply(
            &scaled,
            &cfg.oversample_config(execution),
            seed::derive(cfg.seed, &[seed::tag::PREPROCESS, u64::MAX]),
        )?;
        let train_set = match (cfg.flags.drop_protected_feature, outcome.dataset.protected_column()) {
            (true, Some(pc)) => outcome.dataset.drop_column(pc),
            _ => outcome.dataset,
        };
        let model = train(&train_set, cfg.classifier.kind, &hyper)?;
        Ok(feature_importance(&model, train_set.columns()))
    };
    Ok(ImportanceReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        baseline: rank(Preprocessor::None)?,
        treated: rank(cfg.preprocessor)?,
    })
}

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pipeline::{FoldReport, ImportanceReport, MeanMetrics, RunReport, SweepReport};
use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

/// Any report the runner can emit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Run(RunReport),
    Sweep(SweepReport),
    Importance(ImportanceReport),
}

/// Per-fold rows followed by a `mean` row. Fairness differences are
/// printed as magnitudes.
pub const RUN_CSV_HEADER: &str = "fold,n_train,n_validation,synthetic_rows,ba,aod,aao,eod,tnrd,tprd,fprd,fair_utility,precision,recall,f1,minority_recall";
/// One row per sweep level; skipped levels carry empty metric cells.
pub const SWEEP_CSV_HEADER: &str =
    "level,status,ba,aao,eod,fair_utility,f1,precision,recall,minority_recall";
pub const IMPORTANCE_CSV_HEADER: &str = "arm,rank,feature,importance";

/// Fixed 4-decimal rendering used in CSV output.
pub fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn metric_cells(m: &MeanMetrics) -> [f64; 12] {
    [
        m.ba,
        m.aod.abs(),
        m.aao,
        m.eod,
        m.tnrd.abs(),
        m.tprd.abs(),
        m.fprd.abs(),
        m.fair_utility,
        m.precision,
        m.recall,
        m.f1,
        m.minority_recall,
    ]
}

fn fold_cells(f: &FoldReport) -> [f64; 12] {
    metric_cells(&MeanMetrics::of(std::slice::from_ref(f)))
}

fn join(cells: impl IntoIterator<Item = String>) -> String {
    cells.into_iter().collect::<Vec<_>>().join(",")
}

fn run_csv<W: Write>(r: &RunReport, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{RUN_CSV_HEADER}")?;
    for f in &r.folds {
        let head = [f.fold.to_string(), f.n_train.to_string(), f.n_validation.to_string(), f.synthetic_rows.to_string()];
        writeln!(w, "{}", join(head.into_iter().chain(fold_cells(f).map(fmt4))))?;
    }
    let head = ["mean".to_string(), String::new(), String::new(), String::new()];
    writeln!(w, "{}", join(head.into_iter().chain(metric_cells(&r.mean).map(fmt4))))
}

fn sweep_csv<W: Write>(r: &SweepReport, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for p in &r.points {
        match &p.report {
            Some(run) => {
                let m = &run.mean;
                let cells = [m.ba, m.aao, m.eod, m.fair_utility, m.f1, m.precision, m.recall, m.minority_recall];
                let head = [fmt4(p.level), "ok".to_string()];
                writeln!(w, "{}", join(head.into_iter().chain(cells.map(fmt4))))?;
            }
            None => {
                let head = [fmt4(p.level), "skipped".to_string()];
                writeln!(w, "{}", join(head.into_iter().chain(std::iter::repeat_n(String::new(), 8))))?;
            }
        }
    }
    Ok(())
}

fn importance_csv<W: Write>(r: &ImportanceReport, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{IMPORTANCE_CSV_HEADER}")?;
    let treated = r.config.preprocessor.name();
    for (arm, rows) in [("baseline", &r.baseline), (treated, &r.treated)] {
        for (rank, imp) in rows.iter().enumerate() {
            writeln!(w, "{arm},{},{},{}", rank + 1, csv_field(&imp.name), fmt4(imp.importance))?;
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write `report` in the given format. JSON is pretty-printed with full
/// float precision.
pub fn emit<W: Write>(report: &Report, format: Format, mut out: W) -> Result<(), ExperimentError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        Format::Csv => match report {
            Report::Run(r) => run_csv(r, &mut out)?,
            Report::Sweep(r) => sweep_csv(r, &mut out)?,
            Report::Importance(r) => importance_csv(r, &mut out)?,
        },
    }
    out.flush()?;
    Ok(())
}

pub fn emit_to_path(report: &Report, format: Format, path: impl AsRef<Path>) -> Result<(), ExperimentError> {
    let file = File::create(path.as_ref())?;
    emit(report, format, BufWriter::new(file))
}

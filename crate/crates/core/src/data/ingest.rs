use std::collections::{BTreeSet, HashSet};
use std::io::Read;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{ColumnKind, ColumnMeta, DataError, Dataset};

/// How to turn a CSV file into a [`Dataset`].
///
/// Columns not named here are parsed as continuous numbers. When `negative`
/// (or `unprivileged`) is omitted, the column must hold exactly one value
/// besides the positive (privileged) one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    pub label: String,
    pub positive: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative: Option<String>,
    pub protected: String,
    pub privileged: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unprivileged: Option<String>,
    /// Columns to one-hot encode (one indicator per distinct value, sorted).
    #[serde(default)]
    pub categorical: Vec<String>,
    /// Numeric columns holding only 0/1.
    #[serde(default)]
    pub binary: Vec<String>,
    /// Columns to skip entirely.
    #[serde(default)]
    pub ignore: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: Dataset,
    /// Rows dropped because a used cell was missing.
    pub dropped_rows: usize,
}

const MISSING: [&str; 5] = ["", "?", "na", "n/a", "null"];

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    MISSING.iter().any(|m| t.eq_ignore_ascii_case(m))
}

enum Plan {
    Label,
    Protected,
    Continuous,
    Binary,
    Categorical(Vec<String>),
    Skip,
}

pub fn ingest_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Ingested, DataError> {
    let file = std::fs::File::open(path.as_ref())?;
    ingest_reader(file, schema)
}

/// Ingest CSV text from any reader; see [`ingest_csv`].
pub fn ingest_reader<R: Read>(reader: R, schema: &CsvSchema) -> Result<Ingested, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();

    let find = |name: &str| -> Result<usize, DataError> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let label_col = find(&schema.label)?;
    let protected_col = find(&schema.protected)?;
    let categorical: HashSet<usize> =
        schema.categorical.iter().map(|c| find(c)).collect::<Result<_, _>>()?;
    let binary: HashSet<usize> = schema.binary.iter().map(|c| find(c)).collect::<Result<_, _>>()?;
    let ignored: HashSet<usize> = schema.ignore.iter().map(|c| find(c)).collect::<Result<_, _>>()?;

    let mut records = Vec::new();
    let mut lines = Vec::new();
    let mut dropped = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { pos, .. } => DataError::Arity {
                line: pos.as_ref().map_or(0, |p| p.line()),
            },
            _ => DataError::from(e),
        })?;
        let used_missing = rec
            .iter()
            .enumerate()
            .any(|(c, cell)| !ignored.contains(&c) && is_missing(cell));
        if used_missing {
            dropped += 1;
            continue;
        }
        lines.push(rec.position().map_or(0, |p| p.line()));
        records.push(rec);
    }
    if records.is_empty() {
        return Err(DataError::Empty);
    }

    let mut plans = Vec::with_capacity(header.len());
    for c in 0..header.len() {
        let plan = if c == label_col {
            Plan::Label
        } else if c == protected_col {
            Plan::Protected
        } else if ignored.contains(&c) {
            Plan::Skip
        } else if categorical.contains(&c) {
            let values: BTreeSet<String> =
                records.iter().map(|r| r[c].trim().to_string()).collect();
            Plan::Categorical(values.into_iter().collect())
        } else if binary.contains(&c) {
            Plan::Binary
        } else {
            Plan::Continuous
        };
        plans.push(plan);
    }

    let mut columns = Vec::new();
    let mut protected_feature = None;
    for (c, plan) in plans.iter().enumerate() {
        match plan {
            Plan::Label | Plan::Skip => {}
            Plan::Protected => {
                protected_feature = Some(columns.len());
                columns.push(ColumnMeta::binary(&header[c]));
            }
            Plan::Continuous => columns.push(ColumnMeta::continuous(&header[c])),
            Plan::Binary => columns.push(ColumnMeta::binary(&header[c])),
            Plan::Categorical(values) => {
                for v in values {
                    columns.push(ColumnMeta::new(
                        format!("{}={}", header[c], v),
                        ColumnKind::OneHot { group: header[c].clone() },
                    ));
                }
            }
        }
    }

    let mut label_map = BinaryMap::new(&schema.label, &schema.positive, schema.negative.as_deref());
    let mut group_map =
        BinaryMap::new(&schema.protected, &schema.privileged, schema.unprivileged.as_deref());

    let d = columns.len();
    let n = records.len();
    let mut flat = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut protected = Vec::with_capacity(n);
    for (rec, &line) in records.iter().zip(&lines) {
        for (c, plan) in plans.iter().enumerate() {
            let cell = rec[c].trim();
            match plan {
                Plan::Label => labels.push(label_map.map(cell, line)?),
                Plan::Protected => {
                    let g = group_map.map(cell, line)?;
                    protected.push(g);
                    flat.push(f64::from(g));
                }
                Plan::Skip => {}
                Plan::Continuous => flat.push(parse_number(cell, &header[c], line)?),
                Plan::Binary => {
                    let v = parse_number(cell, &header[c], line)?;
                    if v != 0.0 && v != 1.0 {
                        return Err(DataError::Parse {
                            line,
                            column: header[c].clone(),
                            value: cell.to_string(),
                        });
                    }
                    flat.push(v);
                }
                Plan::Categorical(values) => {
                    flat.extend(values.iter().map(|v| if v == cell { 1.0 } else { 0.0 }));
                }
            }
        }
    }
    let features = Array2::from_shape_vec((n, d), flat).expect("row-major shape");
    let dataset = Dataset::new(features, labels, protected, columns, protected_feature)?;
    Ok(Ingested { dataset, dropped_rows: dropped })
}

fn parse_number(cell: &str, column: &str, line: u64) -> Result<f64, DataError> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DataError::Parse { line, column: column.to_string(), value: cell.to_string() })
}

/// Maps a two-valued column onto {0, 1}.
struct BinaryMap<'a> {
    column: &'a str,
    one: &'a str,
    zero: Option<String>,
    zero_fixed: bool,
}

impl<'a> BinaryMap<'a> {
    fn new(column: &'a str, one: &'a str, zero: Option<&str>) -> Self {
        Self { column, one, zero: zero.map(str::to_string), zero_fixed: zero.is_some() }
    }

    fn map(&mut self, value: &str, line: u64) -> Result<u8, DataError> {
        if value == self.one {
            return Ok(1);
        }
        match &self.zero {
            Some(z) if z == value => Ok(0),
            None if !self.zero_fixed => {
                self.zero = Some(value.to_string());
                Ok(0)
            }
            _ => Err(DataError::Unmappable {
                line,
                column: self.column.to_string(),
                value: value.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> CsvSchema {
        CsvSchema {
            label: "y".into(),
            positive: "yes".into(),
            negative: None,
            protected: "g".into(),
            privileged: "m".into(),
            unprivileged: None,
            categorical: vec!["color".into()],
            binary: vec![],
            ignore: vec![],
        }
    }

    fn ingest(text: &str, schema: &CsvSchema) -> Result<Ingested, DataError> {
        ingest_reader(text.as_bytes(), schema)
    }

    #[test]
    fn one_hot_and_binary_mapping() {
        let text = "x,color,g,y\n1.5,red,m,yes\n2,blue,f,no\n3,red,f,yes\n";
        let out = ingest(text, &schema()).unwrap();
        let d = out.dataset;
        assert_eq!(out.dropped_rows, 0);
        let names: Vec<_> = d.columns().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["x", "color=blue", "color=red", "g"]);
        assert_eq!(d.labels(), &[1, 0, 1]);
        assert_eq!(d.protected(), &[1, 0, 0]);
        assert_eq!(d.protected_column(), Some(3));
        assert_eq!(d.row(1).to_vec(), vec![2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn single_continuous_row() {
        let s = CsvSchema { categorical: vec![], ..schema() };
        let out = ingest("a,b,g,y\n1,2,m,yes\n", &s).unwrap();
        assert_eq!(out.dataset.n_rows(), 1);
        // a, b and the protected indicator
        assert_eq!(out.dataset.n_features(), 3);
    }

    #[test]
    fn missing_cells_drop_rows() {
        let s = CsvSchema { categorical: vec![], ..schema() };
        let out = ingest("a,g,y\n1,m,yes\n,f,no\n3,f,no\n", &s).unwrap();
        assert_eq!(out.dataset.n_rows(), 2);
        assert_eq!(out.dropped_rows, 1);
        let out = ingest("a,g,y\n1,m,yes\n?,f,no\n3,f,no\n", &s).unwrap();
        assert_eq!(out.dropped_rows, 1);
    }

    #[test]
    fn schema_errors() {
        let s = CsvSchema { label: "class".into(), ..schema() };
        assert!(matches!(
            ingest("x,color,g,y\n1,red,m,yes\n", &s),
            Err(DataError::MissingColumn(c)) if c == "class"
        ));
    }

    #[test]
    fn unmappable_label_names_line() {
        let s = CsvSchema { categorical: vec![], ..schema() };
        let err = ingest("a,g,y\n1,m,yes\n2,f,no\n3,f,maybe\n", &s).unwrap_err();
        match err {
            DataError::Unmappable { line, column, value } => {
                assert_eq!(line, 4);
                assert_eq!(column, "y");
                assert_eq!(value, "maybe");
            }
            other => panic!("unexpected {other:?}"),
        }
        let strict = CsvSchema { negative: Some("no".into()), categorical: vec![], ..schema() };
        assert!(matches!(
            ingest("a,g,y\n1,m,nope\n", &strict),
            Err(DataError::Unmappable { line: 2, .. })
        ));
    }

    #[test]
    fn arity_and_parse_errors() {
        let s = CsvSchema { categorical: vec![], ..schema() };
        assert!(matches!(ingest("a,g,y\n1,m\n", &s), Err(DataError::Arity { line: 2 })));
        assert!(matches!(ingest("a,g,y\nabc,m,yes\n", &s), Err(DataError::Parse { .. })));
        assert!(matches!(ingest("a,g,y\n,m,yes\n", &s), Err(DataError::Empty)));
    }
}

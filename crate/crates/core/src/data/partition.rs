use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

/// One of the four class × protected-group cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    PrivilegedMajority,
    UnprivilegedMajority,
    PrivilegedMinority,
    UnprivilegedMinority,
}

impl Cell {
    pub const ALL: [Cell; 4] = [
        Cell::PrivilegedMajority,
        Cell::UnprivilegedMajority,
        Cell::PrivilegedMinority,
        Cell::UnprivilegedMinority,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Cell::PrivilegedMajority => "prmaj",
            Cell::UnprivilegedMajority => "upmaj",
            Cell::PrivilegedMinority => "prmin",
            Cell::UnprivilegedMinority => "upmin",
        }
    }

    pub fn is_minority(self) -> bool {
        matches!(self, Cell::PrivilegedMinority | Cell::UnprivilegedMinority)
    }

    pub fn is_privileged(self) -> bool {
        matches!(self, Cell::PrivilegedMajority | Cell::PrivilegedMinority)
    }

    /// Protected-attribute value of rows in this cell.
    pub fn protected_value(self) -> u8 {
        u8::from(self.is_privileged())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Sizes of the four cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CellCounts {
    pub prmaj: usize,
    pub upmaj: usize,
    pub prmin: usize,
    pub upmin: usize,
}

impl CellCounts {
    pub fn new(prmaj: usize, upmaj: usize, prmin: usize, upmin: usize) -> Self {
        Self { prmaj, upmaj, prmin, upmin }
    }

    pub fn get(&self, cell: Cell) -> usize {
        match cell {
            Cell::PrivilegedMajority => self.prmaj,
            Cell::UnprivilegedMajority => self.upmaj,
            Cell::PrivilegedMinority => self.prmin,
            Cell::UnprivilegedMinority => self.upmin,
        }
    }

    pub fn majority(&self) -> usize {
        self.prmaj + self.upmaj
    }

    pub fn minority(&self) -> usize {
        self.prmin + self.upmin
    }

    pub fn privileged(&self) -> usize {
        self.prmaj + self.prmin
    }

    pub fn unprivileged(&self) -> usize {
        self.upmaj + self.upmin
    }

    pub fn total(&self) -> usize {
        self.majority() + self.minority()
    }

    /// Both minority cells match their majority counterparts.
    pub fn is_cell_balanced(&self) -> bool {
        self.prmin == self.prmaj && self.upmin == self.upmaj
    }
}

/// Row indices of each cell, relative to one dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupPartition {
    pub minority_label: u8,
    pub prmaj: Vec<usize>,
    pub upmaj: Vec<usize>,
    pub prmin: Vec<usize>,
    pub upmin: Vec<usize>,
}

impl SubgroupPartition {
    pub fn cell(&self, cell: Cell) -> &[usize] {
        match cell {
            Cell::PrivilegedMajority => &self.prmaj,
            Cell::UnprivilegedMajority => &self.upmaj,
            Cell::PrivilegedMinority => &self.prmin,
            Cell::UnprivilegedMinority => &self.upmin,
        }
    }

    pub fn counts(&self) -> CellCounts {
        CellCounts::new(self.prmaj.len(), self.upmaj.len(), self.prmin.len(), self.upmin.len())
    }

    pub fn majority_label(&self) -> u8 {
        1 - self.minority_label
    }

    /// All minority-class rows in ascending index order.
    pub fn minority_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.prmin.iter().chain(&self.upmin).copied().collect();
        rows.sort_unstable();
        rows
    }
}

/// The label strictly less frequent in `labels`; ties go to label 1.
pub fn minority_label(labels: &[u8]) -> u8 {
    let ones = labels.iter().filter(|&&y| y == 1).count();
    let zeros = labels.len() - ones;
    if zeros < ones {
        0
    } else {
        1
    }
}

pub fn partition_subgroups(d: &Dataset) -> SubgroupPartition {
    let minority = minority_label(d.labels());
    let mut p = SubgroupPartition {
        minority_label: minority,
        prmaj: Vec::new(),
        upmaj: Vec::new(),
        prmin: Vec::new(),
        upmin: Vec::new(),
    };
    for (i, (&y, &g)) in d.labels().iter().zip(d.protected()).enumerate() {
        let bucket = match (y == minority, g == 1) {
            (false, true) => &mut p.prmaj,
            (false, false) => &mut p.upmaj,
            (true, true) => &mut p.prmin,
            (true, false) => &mut p.upmin,
        };
        bucket.push(i);
    }
    p
}

/// Imbalance ratios, each reported as larger count over smaller count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub counts: CellCounts,
    pub class_ratio: f64,
    pub protected_ratio: f64,
    pub prmaj_to_upmaj_ratio: f64,
    pub prmin_to_upmin_ratio: f64,
}

fn ratio(a: usize, b: usize, a_name: &'static str, b_name: &'static str) -> Result<f64, DataError> {
    if a == 0 {
        return Err(DataError::DegenerateRatio { cell: a_name });
    }
    if b == 0 {
        return Err(DataError::DegenerateRatio { cell: b_name });
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    Ok(hi as f64 / lo as f64)
}

pub fn imbalance_ratios(counts: CellCounts) -> Result<RatioReport, DataError> {
    Ok(RatioReport {
        counts,
        class_ratio: ratio(counts.majority(), counts.minority(), "majority", "minority")?,
        protected_ratio: ratio(counts.privileged(), counts.unprivileged(), "privileged", "unprivileged")?,
        prmaj_to_upmaj_ratio: ratio(counts.prmaj, counts.upmaj, "prmaj", "upmaj")?,
        prmin_to_upmin_ratio: ratio(counts.prmin, counts.upmin, "prmin", "upmin")?,
    })
}

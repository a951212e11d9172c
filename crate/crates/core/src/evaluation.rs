//! Agreement between manually templated and automatically sized cups.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fmt::ratio;

/// One study: sizes chosen by the surgeon and by the tool, in mm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizePair {
    pub label: String,
    pub observational_mm: u32,
    pub digital_mm: u32,
}

impl SizePair {
    pub fn new(label: impl Into<String>, observational_mm: u32, digital_mm: u32) -> Self {
        SizePair {
            label: label.into(),
            observational_mm,
            digital_mm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub patient_label: String,
    pub size_observational: u32,
    pub size_digital: u32,
    /// digital - observational
    pub difference: i64,
}

impl ComparisonRow {
    pub fn abs_difference(&self) -> u64 {
        self.difference.unsigned_abs()
    }

    /// Magnitude with a `±` prefix, `0` when equal.
    pub fn difference_display(&self) -> String {
        match self.abs_difference() {
            0 => String::from("0"),
            d => format!("±{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no pairs to compare")]
    EmptyDataset,
    #[error("{label}: size {size_mm} mm must be a positive even number")]
    InvalidSize { label: String, size_mm: u32 },
}

/// Counts are exact; rates and means are kept as integer ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementReport {
    pub rows: Vec<ComparisonRow>,
    pub tolerance_mm: u32,
    pub within_tolerance_count: u64,
    pub outliers: Vec<ComparisonRow>,
    /// Sum of |difference| over all rows; the mean is this over `n`.
    pub total_abs_difference: u64,
}

impl AgreementReport {
    pub fn n(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn within_tolerance_rate(&self) -> f64 {
        self.within_tolerance_count as f64 / self.n() as f64
    }

    pub fn mean_abs_difference(&self) -> f64 {
        self.total_abs_difference as f64 / self.n() as f64
    }

    /// Rate as an exact decimal with `decimals` places, e.g. `"0.900"`.
    pub fn rate_text(&self, decimals: u32) -> String {
        ratio(self.within_tolerance_count, self.n(), decimals)
    }

    pub fn percent_text(&self, decimals: u32) -> String {
        ratio(self.within_tolerance_count * 100, self.n(), decimals)
    }

    pub fn mean_abs_difference_text(&self, decimals: u32) -> String {
        ratio(self.total_abs_difference, self.n(), decimals)
    }

    /// One-line summary, e.g.
    /// `9/10 (90.0%) within ±2; outlier: patient 8 (|diff| 4); mean |diff| 1.0 mm`.
    pub fn summary(&self) -> String {
        let outliers = match self.outliers.as_slice() {
            [] => String::from("no outliers"),
            [one] => format!("outlier: patient {} (|diff| {})", one.patient_label, one.abs_difference()),
            many => format!(
                "outliers: {}",
                many.iter()
                    .map(|r| format!("patient {} (|diff| {})", r.patient_label, r.abs_difference()))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        };
        format!(
            "{}/{} ({}%) within ±{}; {}; mean |diff| {} mm",
            self.within_tolerance_count,
            self.n(),
            self.percent_text(1),
            self.tolerance_mm,
            outliers,
            self.mean_abs_difference_text(1)
        )
    }
}

/// Compares paired sizes; a pair agrees when its sizes differ by at most
/// `tolerance_mm`.
pub fn compare(pairs: &[SizePair], tolerance_mm: u32) -> Result<AgreementReport, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for p in pairs {
        for size_mm in [p.observational_mm, p.digital_mm] {
            if size_mm == 0 || size_mm % 2 != 0 {
                return Err(EvalError::InvalidSize {
                    label: p.label.clone(),
                    size_mm,
                });
            }
        }
        rows.push(ComparisonRow {
            patient_label: p.label.clone(),
            size_observational: p.observational_mm,
            size_digital: p.digital_mm,
            difference: i64::from(p.digital_mm) - i64::from(p.observational_mm),
        });
    }
    let outliers: Vec<ComparisonRow> = rows
        .iter()
        .filter(|r| r.abs_difference() > u64::from(tolerance_mm))
        .cloned()
        .collect();
    Ok(AgreementReport {
        within_tolerance_count: (rows.len() - outliers.len()) as u64,
        total_abs_difference: rows.iter().map(ComparisonRow::abs_difference).sum(),
        tolerance_mm,
        outliers,
        rows,
    })
}

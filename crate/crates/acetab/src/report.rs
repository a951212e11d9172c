//! Plain-text and CSV rendering for the batch commands. Output depends only
//! on the input values, so identical inputs give identical bytes.

use std::fmt::Write as _;

use acetab_core::{AgreementReport, SizingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

/// Left-aligned first column, right-aligned numeric columns.
fn aligned(header: &[&str], rows: &[Vec<String>], left_cols: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let all = std::iter::once(header.iter().map(|s| s.to_string()).collect::<Vec<_>>()).chain(rows.iter().cloned());
    for row in all {
        let mut line = String::new();
        for (i, (cell, w)) in row.iter().zip(&widths).enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = w - cell.chars().count();
            if i < left_cols {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn measured_text(mm: f64) -> String {
    format!("{mm:.2}")
}

pub fn size_cell(result: &SizingResult) -> String {
    match (result.snapped_size_mm(), result.rejected_reason()) {
        (Some(size), _) => size.to_string(),
        (None, Some(reason)) => format!("REJECTED({reason})"),
        (None, None) => unreachable!("sizing is either accepted or rejected"),
    }
}

pub fn sizing_table(rows: &[(String, SizingResult)], format: Format) -> String {
    match format {
        Format::Text => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|(label, r)| vec![label.clone(), measured_text(r.measured_mm), size_cell(r)])
                .collect();
            aligned(&["label", "measured_mm", "size"], &cells, 1)
        }
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|(label, r)| {
                    vec![
                        label.clone(),
                        measured_text(r.measured_mm),
                        r.snapped_size_mm().map(|s| s.to_string()).unwrap_or_default(),
                        r.rejected_reason().map(|s| s.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            csv_text(&["label", "measured_mm", "size_mm", "rejected_reason"], &cells)
        }
    }
}

pub fn agreement(report: &AgreementReport, format: Format) -> String {
    match format {
        Format::Text => {
            let cells: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.patient_label.clone(),
                        r.size_observational.to_string(),
                        r.size_digital.to_string(),
                        r.difference_display(),
                    ]
                })
                .collect();
            let mut out = aligned(&["patient", "observational_mm", "digital_mm", "difference"], &cells, 1);
            out.push('\n');
            out.push_str(&report.summary());
            out.push_str("\n\n");
            let outliers: Vec<&str> = report.outliers.iter().map(|r| r.patient_label.as_str()).collect();
            let _ = writeln!(out, "n: {}", report.n());
            let _ = writeln!(out, "tolerance_mm: {}", report.tolerance_mm);
            let _ = writeln!(out, "within_tolerance_count: {}", report.within_tolerance_count);
            let _ = writeln!(out, "within_tolerance_rate: {}", report.rate_text(3));
            let _ = writeln!(out, "mean_abs_difference_mm: {}", report.mean_abs_difference_text(3));
            let _ = writeln!(out, "outliers: {}", outliers.join(","));
            out
        }
        Format::Csv => {
            let tolerance = u64::from(report.tolerance_mm);
            let cells: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.patient_label.clone(),
                        r.size_observational.to_string(),
                        r.size_digital.to_string(),
                        r.difference.to_string(),
                        (r.abs_difference() <= tolerance).to_string(),
                    ]
                })
                .collect();
            csv_text(
                &["label", "observational_mm", "digital_mm", "difference_mm", "within_tolerance"],
                &cells,
            )
        }
    }
}

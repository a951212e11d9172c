//! File inputs: catalogs, measurement batches and comparison pairs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use acetab_core::catalog::{parse_catalog, CatalogIssue};
use acetab_core::{ImplantCatalog, PointPx, SegmentPx, SizePair};
use thiserror::Error;

pub const DEFAULT_CATALOG: &str = include_str!("../data/default.catalog");
pub const DEFAULT_OUTLINES: &str = include_str!("../data/default.outlines");

pub const MEASUREMENT_HEADER: [&str; 6] = ["label", "ax", "ay", "bx", "by", "mm_per_px"];
pub const PAIRS_HEADER: [&str; 3] = ["label", "observational_mm", "digital_mm"];

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: line {line}: {message}", path.display())]
    Row { path: PathBuf, line: u64, message: String },
    #[error("{}:{}", path.display(), render_issues(issues))]
    Catalog { path: PathBuf, issues: Vec<CatalogIssue> },
}

fn render_issues(issues: &[CatalogIssue]) -> String {
    let mut out = String::new();
    for issue in issues {
        let _ = write!(out, "\n  {issue}");
    }
    out
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The bundled even 36-80 mm catalog.
pub fn default_catalog() -> ImplantCatalog {
    parse_catalog(DEFAULT_CATALOG, DEFAULT_OUTLINES).expect("bundled catalog is valid")
}

/// Outline file paired with a catalog file: same path, `.outlines` extension.
pub fn outlines_path(catalog: &Path) -> PathBuf {
    catalog.with_extension("outlines")
}

pub fn load_catalog(path: &Path) -> Result<ImplantCatalog, InputError> {
    let entries = read(path)?;
    let outlines = read(&outlines_path(path))?;
    parse_catalog(&entries, &outlines).map_err(|issues| InputError::Catalog {
        path: path.to_path_buf(),
        issues,
    })
}

/// Every problem in a catalog, empty when it is valid.
pub fn check_catalog(path: &Path) -> Result<Result<ImplantCatalog, Vec<CatalogIssue>>, InputError> {
    let entries = read(path)?;
    let outlines = read(&outlines_path(path))?;
    Ok(parse_catalog(&entries, &outlines))
}

/// One row of a measurement batch, before any validation of its geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRow {
    pub line: u64,
    pub label: String,
    pub segment: SegmentPx,
    pub mm_per_px: f64,
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(path: &Path, reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), InputError> {
    let row_error = |line, message| InputError::Row {
        path: path.to_path_buf(),
        line,
        message,
    };
    let header = reader.headers().map_err(|e| row_error(1, e.to_string()))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(row_error(1, format!("expected header `{}`", expected.join(","))));
    }
    Ok(())
}

fn records(
    path: &Path,
    reader: &mut csv::Reader<&[u8]>,
    width: usize,
) -> Result<Vec<(u64, csv::StringRecord)>, InputError> {
    reader.records().map(|r| {
        let record = r.map_err(|e| InputError::Row {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(InputError::Row {
                path: path.to_path_buf(),
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        Ok((line, record))
    })
    .collect()
}

pub fn parse_measurements(path: &Path, text: &str) -> Result<Vec<MeasurementRow>, InputError> {
    let mut reader = csv_reader(text);
    check_header(path, &mut reader, &MEASUREMENT_HEADER)?;
    let mut rows = Vec::new();
    for (line, record) in records(path, &mut reader, MEASUREMENT_HEADER.len())? {
        let mut nums = [0.0f64; 5];
        for (i, slot) in nums.iter_mut().enumerate() {
            let field = &record[i + 1];
            *slot = field.parse().map_err(|_| InputError::Row {
                path: path.to_path_buf(),
                line,
                message: format!("{} {field:?} is not a number", MEASUREMENT_HEADER[i + 1]),
            })?;
        }
        let [ax, ay, bx, by, mm_per_px] = nums;
        rows.push(MeasurementRow {
            line,
            label: record[0].to_string(),
            segment: SegmentPx::new(PointPx::new(ax, ay), PointPx::new(bx, by)),
            mm_per_px,
        });
    }
    Ok(rows)
}

pub fn load_measurements(path: &Path) -> Result<Vec<MeasurementRow>, InputError> {
    parse_measurements(path, &read(path)?)
}

pub fn parse_pairs(path: &Path, text: &str) -> Result<Vec<SizePair>, InputError> {
    let mut reader = csv_reader(text);
    check_header(path, &mut reader, &PAIRS_HEADER)?;
    let mut pairs = Vec::new();
    for (line, record) in records(path, &mut reader, PAIRS_HEADER.len())? {
        let size = |i: usize| {
            record[i].parse::<u32>().map_err(|_| InputError::Row {
                path: path.to_path_buf(),
                line,
                message: format!("{} {:?} is not a whole number of mm", PAIRS_HEADER[i], &record[i]),
            })
        };
        pairs.push(SizePair::new(&record[0], size(1)?, size(2)?));
    }
    Ok(pairs)
}

/// Reads a `label,observational_mm,digital_mm` file, keeping row order.
pub fn load_pairs(path: &Path) -> Result<Vec<SizePair>, InputError> {
    parse_pairs(path, &read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("in.csv")
    }

    #[test]
    fn bundled_catalog_is_the_standard_one() {
        assert_eq!(default_catalog(), ImplantCatalog::standard("Versys"));
    }

    #[test]
    fn pairs_keep_order_and_report_lines() {
        let rows = parse_pairs(p(), "label,observational_mm,digital_mm\n1,48,48\n2,54,52\n").unwrap();
        assert_eq!(rows, vec![SizePair::new("1", 48, 48), SizePair::new("2", 54, 52)]);
        assert!(parse_pairs(p(), "label,observational_mm,digital_mm\n").unwrap().is_empty());
        let err = parse_pairs(p(), "label,observational_mm,digital_mm\n1,48,48\n2,54.5,52\n").unwrap_err();
        assert!(matches!(err, InputError::Row { line: 3, .. }), "{err}");
        let err = parse_pairs(p(), "patient,obs,dig\n").unwrap_err();
        assert!(matches!(err, InputError::Row { line: 1, .. }));
        let err = parse_pairs(p(), "label,observational_mm,digital_mm\n1,48\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn measurement_rows() {
        let text = "label,ax,ay,bx,by,mm_per_px\nt1,0,0,48.58,0,1\nt2,0,0,x,0,1\n";
        let err = parse_measurements(p(), text).unwrap_err();
        assert_eq!(err.to_string(), "in.csv: line 3: bx \"x\" is not a number");
        let rows = parse_measurements(p(), "label,ax,ay,bx,by,mm_per_px\nt1,0,0,48.58,0,1\n").unwrap();
        assert_eq!(rows[0].segment.b.x, 48.58);
        assert_eq!(rows[0].line, 2);
    }
}

#![allow(dead_code)]

pub mod api;

use std::path::{Path, PathBuf};

use acetab_core::{Calibration, Gender, ImplantCatalog, PatientInfo, PlanRecord, PointPx, SegmentPx, Session, Side};

pub fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    crate_dir().join("fixtures").join(name)
}

pub fn default_catalog_path() -> PathBuf {
    crate_dir().join("data").join("default.catalog")
}

/// Compares `actual` with a checked-in file; `BLESS=1` rewrites it instead.
pub fn golden(path: &Path, actual: &str) {
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(expected, actual, "golden mismatch for {}", path.display());
}

pub fn sample_patient() -> PatientInfo {
    PatientInfo {
        patient_name: "JEY".into(),
        gender: Gender::F,
        patient_id: "N089682.2008".into(),
        dob: "195805".into(),
    }
}

/// Plan for a 116.56 px line at 0.5 mm/px (58.28 mm, size 58), default placement.
pub fn sample_record(catalog: &ImplantCatalog) -> PlanRecord {
    let mut s = Session::new("sample", "fixture");
    s.set_calibration(Calibration::new(0.5).unwrap());
    s.set_measurement(
        SegmentPx::new(PointPx::new(0.0, 0.0), PointPx::new(116.56, 0.0)),
        Side::Left,
        catalog,
    )
    .unwrap();
    s.plan_record(sample_patient(), catalog).unwrap()
}

mod common;

use std::path::Path;
use std::process::{Command, Output};

use acetab::io::{load_measurements, DEFAULT_CATALOG, DEFAULT_OUTLINES};
use acetab::report::{measured_text, size_cell};
use acetab_core::{measure_and_size, Calibration, ImplantCatalog};
use common::{default_catalog_path, fixture};

fn acetab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acetab"))
        .args(args)
        .output()
        .expect("run acetab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn size_reference() {
    let input = fixture("reference_measurements.csv");
    let catalog = default_catalog_path();
    let out = acetab(&["size", "--input", p(&input), "--catalog", p(&catalog)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let sizes: Vec<String> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().last().unwrap().to_string())
        .collect();
    assert_eq!(sizes, ["48", "56", "58", "52", "66", "68", "72", "76"]);
}

#[test]
fn size_matches_library_row_for_row() {
    let input = fixture("reference_measurements.csv");
    let out = acetab(&["size", "--input", p(&input), "--format", "csv"]);
    let catalog = ImplantCatalog::standard("Versys");
    let rows = load_measurements(&input).unwrap();
    let text = stdout(&out);
    for (row, line) in rows.iter().zip(text.lines().skip(1)) {
        let r = measure_and_size(&row.segment, &Calibration::new(row.mm_per_px).unwrap(), &catalog).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], row.label);
        assert_eq!(fields[1], measured_text(r.measured_mm));
        assert_eq!(fields[2], size_cell(&r));
    }
}

#[test]
fn size_rejections_are_not_failures() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    std::fs::write(&input, "label,ax,ay,bx,by,mm_per_px\nsmall,0,0,60,0,0.5\nbig,0,0,164,0,0.5\nok,10,10,10,170,0.3\n").unwrap();
    let out = acetab(&["size", "--input", p(&input)]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "label  measured_mm                 size\n\
         small        30.00  REJECTED(below_min)\n\
         big          82.00  REJECTED(above_max)\n\
         ok           48.00                   48\n"
    );
}

#[test]
fn size_empty_and_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "label,ax,ay,bx,by,mm_per_px\n").unwrap();
    let out = acetab(&["size", "--input", p(&empty)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "label  measured_mm  size\n");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "label,ax,ay,bx,by,mm_per_px\nok,0,0,100,0,0.5\ndot,5,5,5,5,0.5\n").unwrap();
    let out = acetab(&["size", "--input", p(&bad)]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("invalid measurement"), "{err}");
    assert!(stdout(&out).is_empty());

    let bad_scale = dir.path().join("scale.csv");
    std::fs::write(&bad_scale, "label,ax,ay,bx,by,mm_per_px\nok,0,0,100,0,0\n").unwrap();
    let out = acetab(&["size", "--input", p(&bad_scale)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"));

    let out = acetab(&["size", "--input", p(&dir.path().join("missing.csv"))]);
    assert!(!out.status.success());
}

#[test]
fn compare_reference() {
    let pairs = fixture("reference_pairs.csv");
    let out = acetab(&["compare", "--pairs", p(&pairs), "--tolerance", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("9/10 (90.0%) within ±2; outlier: patient 8 (|diff| 4); mean |diff| 1.0 mm"));

    let out = acetab(&["compare", "--pairs", p(&pairs), "--tolerance", "4"]);
    assert!(stdout(&out).contains("10/10 (100.0%) within ±4; no outliers"));
}

#[test]
fn compare_identical_and_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let same = dir.path().join("same.csv");
    std::fs::write(&same, "label,observational_mm,digital_mm\na,50,50\nb,52,52\n").unwrap();
    let out = acetab(&["compare", "--pairs", p(&same), "--tolerance", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("2/2 (100.0%)"));

    let odd = dir.path().join("odd.csv");
    std::fs::write(&odd, "label,observational_mm,digital_mm\na,51,50\n").unwrap();
    assert!(!acetab(&["compare", "--pairs", p(&odd)]).status.success());

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "label,observational_mm,digital_mm\n").unwrap();
    let out = acetab(&["compare", "--pairs", p(&empty)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no pairs"));
}

fn write_catalog(dir: &Path, entries: &str) -> std::path::PathBuf {
    let path = dir.join("c.catalog");
    std::fs::write(&path, entries).unwrap();
    std::fs::write(dir.join("c.outlines"), DEFAULT_OUTLINES).unwrap();
    path
}

#[test]
fn catalog_check() {
    let out = acetab(&["catalog-check", p(&default_catalog_path())]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "OK: Versys 36-80 mm, 46 entries\n");

    let dir = tempfile::tempdir().unwrap();
    let odd = DEFAULT_CATALOG.replace("Versys left 58 cup58L", "Versys left 57 cup58L");
    let line = odd.lines().position(|l| l.contains(" 57 ")).unwrap() + 1;
    let out = acetab(&["catalog-check", p(&write_catalog(dir.path(), &odd))]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains(&format!("catalog line {line}: parity violation: size 57 mm is odd")));

    let missing: String = DEFAULT_CATALOG.lines().filter(|l| !l.contains(" 44 ")).map(|l| format!("{l}\n")).collect();
    let out = acetab(&["catalog-check", p(&write_catalog(dir.path(), &missing))]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains("contiguity violation: size 44 mm missing"));
}

#[test]
fn output_is_deterministic() {
    let input = fixture("reference_measurements.csv");
    let a = acetab(&["size", "--input", p(&input)]);
    let b = acetab(&["size", "--input", p(&input)]);
    assert_eq!(a.stdout, b.stdout);
}

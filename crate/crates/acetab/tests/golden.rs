mod common;

use acetab::cli::{run_batch, Command};
use acetab::report::Format;
use acetab_core::{plan_format, ImplantCatalog};
use common::{crate_dir, fixture, golden};

fn batch(command: Command) -> String {
    let mut out = Vec::new();
    assert_eq!(run_batch(&command, &mut out).unwrap(), 0);
    String::from_utf8(out).unwrap()
}

#[test]
fn bundled_catalog_files() {
    let (entries, outlines) = ImplantCatalog::standard("Versys").to_text();
    golden(&crate_dir().join("data/default.catalog"), &entries);
    golden(&crate_dir().join("data/default.outlines"), &outlines);
}

#[test]
fn sample_plan_file() {
    let record = common::sample_record(&ImplantCatalog::standard("Versys"));
    golden(&fixture("golden/sample.plan"), &plan_format::to_text(&record));
}

#[test]
fn size_reports() {
    for (format, name) in [(Format::Text, "size_reference.txt"), (Format::Csv, "size_reference.csv")] {
        let out = batch(Command::Size {
            input: fixture("reference_measurements.csv"),
            catalog: None,
            format,
        });
        golden(&fixture("golden").join(name), &out);
    }
}

#[test]
fn compare_reports() {
    for (format, name) in [(Format::Text, "compare_reference.txt"), (Format::Csv, "compare_reference.csv")] {
        let out = batch(Command::Compare {
            pairs: fixture("reference_pairs.csv"),
            tolerance: 2,
            format,
        });
        golden(&fixture("golden").join(name), &out);
    }
}

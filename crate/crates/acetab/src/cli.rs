//! Command-line front end.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use acetab_core::{measure_and_size, Calibration, ImplantCatalog};
use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use crate::io::{self, InputError};
use crate::report::{self, Format};

#[derive(Debug, Parser)]
#[command(name = "acetab", version, about = "Acetabular cup sizing and templating tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size each measured diameter line in a CSV batch.
    Size {
        /// CSV with header `label,ax,ay,bx,by,mm_per_px`.
        #[arg(long)]
        input: PathBuf,
        /// Catalog entry file; its outlines are read from the `.outlines`
        /// file next to it. Defaults to the bundled 36-80 mm catalog.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Agreement between observational and digital sizes.
    Compare {
        /// CSV with header `label,observational_mm,digital_mm`.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value_t = 2)]
        tolerance: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Validate a catalog file and its outlines.
    CatalogCheck { path: PathBuf },
    /// Run the HTTP planning service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Directory holding saved plans.
        #[arg(long, default_value = "plans")]
        plans: PathBuf,
        /// Directory of static files served under `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

pub fn load_catalog_or_default(path: Option<&PathBuf>) -> Result<ImplantCatalog, InputError> {
    match path {
        Some(p) => io::load_catalog(p),
        None => Ok(io::default_catalog()),
    }
}

/// Runs a batch command, writing its report to `out`. Returns the process
/// exit code; errors are for the caller to print.
pub fn run_batch(command: &Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Size { input, catalog, format } => {
            let catalog = load_catalog_or_default(catalog.as_ref())?;
            let rows = io::load_measurements(input)?;
            let mut results = Vec::with_capacity(rows.len());
            for row in rows {
                let at = |e: &dyn std::fmt::Display| anyhow!("{}: line {}: {e}", input.display(), row.line);
                let calibration = Calibration::new(row.mm_per_px).map_err(|e| at(&e))?;
                let sizing = measure_and_size(&row.segment, &calibration, &catalog).map_err(|e| at(&e))?;
                results.push((row.label, sizing));
            }
            out.write_all(report::sizing_table(&results, *format).as_bytes())?;
            Ok(0)
        }
        Command::Compare { pairs, tolerance, format } => {
            let rows = io::load_pairs(pairs)?;
            let report = acetab_core::compare(&rows, *tolerance).with_context(|| pairs.display().to_string())?;
            out.write_all(report::agreement(&report, *format).as_bytes())?;
            Ok(0)
        }
        Command::CatalogCheck { path } => match io::check_catalog(path)? {
            Ok(catalog) => {
                writeln!(
                    out,
                    "OK: {} {}-{} mm, {} entries",
                    catalog.brand(),
                    catalog.min_size(),
                    catalog.max_size(),
                    catalog.entries().len()
                )?;
                Ok(0)
            }
            Err(issues) => {
                for issue in &issues {
                    writeln!(out, "{issue}")?;
                }
                writeln!(out, "FAILED: {} problem(s)", issues.len())?;
                Ok(1)
            }
        },
        Command::Serve { .. } => Err(anyhow!("serve is not a batch command")),
    }
}

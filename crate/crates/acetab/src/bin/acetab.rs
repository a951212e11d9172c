use std::io::Write;
use std::process::ExitCode;

use acetab::cli::{load_catalog_or_default, run_batch, Cli, Command};
use acetab::service::{router_with_static, AppState};
use acetab::store::PlanStore;
use anyhow::Context;
use clap::Parser;

fn serve(command: Command) -> anyhow::Result<()> {
    let Command::Serve { addr, catalog, plans, static_dir } = command else {
        unreachable!("only called for serve");
    };
    let catalog = load_catalog_or_default(catalog.as_ref())?;
    let store = PlanStore::open(&plans).with_context(|| format!("opening plan store {}", plans.display()))?;
    let app = router_with_static(AppState::new(catalog, store), static_dir);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        tracing::info!(%addr, "listening");
        axum::serve(listener, app).await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let cli = Cli::parse();
    let result = match cli.command {
        command @ Command::Serve { .. } => serve(command).map(|()| 0),
        command => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            let code = run_batch(&command, &mut out);
            let _ = out.flush();
            code
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

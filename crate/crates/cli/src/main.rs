use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use superkoszul_cli::manifest::parse_manifest;
use superkoszul_cli::report::color_from_env;
use superkoszul_cli::run_suite;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Verify homotopy Poisson data, higher Koszul brackets and their quantum
/// transforms against a manifest.
#[derive(Debug, Parser)]
#[command(name = "superkoszul", version)]
struct Args {
    /// pinfty, koszul, jacobi, symbols, quantum-brackets, mx, modular, thick,
    /// intertwine or all
    suite: String,

    #[arg(long)]
    manifest: PathBuf,

    /// Overrides the manifest seed.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    hbar_order: Option<u32>,

    #[arg(long)]
    momentum_order: Option<u32>,

    #[arg(long, value_enum, default_value = "text")]
    report: Format,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut m = match parse_manifest(&args.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        m.budgets.seed = s;
    }
    if let Some(h) = args.hbar_order {
        m.budgets.hbar_order = h;
    }
    if let Some(k) = args.momentum_order {
        m.budgets.momentum_order = k;
    }
    if m.budgets.hbar_order == 0 || m.budgets.momentum_order == 0 {
        eprintln!("error: --hbar-order and --momentum-order must be positive");
        return ExitCode::from(2);
    }
    let report = match run_suite(&args.suite, &m) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match args.report {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text(color_from_env())),
    }
    ExitCode::from(report.exit_code() as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirconv::cli::{render, run, Format, RunOptions};

#[derive(Parser)]
#[command(name = "dirconv", version, about = "Polynomial equations in Dirichlet algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the problem described by a JSON spec file.
    Run {
        spec: PathBuf,
        #[arg(long, default_value = "table")]
        format: Format,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Acceptance tolerance for double-precision residuals.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn main() -> ExitCode {
    let Command::Run { spec, format, out, threads, tolerance } = Cli::parse().command;
    let doc = match run(&spec, &RunOptions { threads, tolerance }) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("dirconv: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = render(&doc, format);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("dirconv: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if let Some(d) = &doc.diagnostic {
        eprintln!("dirconv: {}", d.message);
    }
    ExitCode::from(doc.exit_code() as u8)
}

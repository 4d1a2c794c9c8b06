// Drives the JSON problem format from code, the same path `dirconv run`
// takes. Pass a spec path to run it, otherwise the bundled specs run.

use std::path::{Path, PathBuf};

use dirconv::cli::{render, run, Format, RunOptions};

fn show(spec: &Path) -> Result<(), Box<dyn std::error::Error>> {
    let doc = run(spec, &RunOptions::default())?;
    println!("== {} (exit {})", spec.display(), doc.exit_code());
    for line in render(&doc, Format::Table).lines().take(14) {
        println!("{line}");
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut specs: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.ends_with("coefficients.json"))
        .collect();
    specs.sort();
    for spec in specs {
        show(&spec)?;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    match std::env::args().nth(1) {
        Some(path) => show(Path::new(&path)),
        None => run_example(),
    }
}

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use wasep::harness::{Report, Settings};

#[derive(Serialize)]
struct Manifest<'a> {
    version: String,
    experiment: &'a str,
    seed: u64,
    threads: Option<usize>,
    params: &'a std::collections::BTreeMap<String, String>,
    verdict: &'a str,
}

pub fn version() -> String {
    match option_env!("WASEP_GIT_DESCRIBE") {
        Some(d) => d.to_string(),
        None => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

/// Writes manifest.json, table.csv and verdict.txt into `dir`.
pub fn write_run(dir: &Path, settings: &Settings, threads: Option<usize>, report: &Report) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let manifest = Manifest {
        version: version(),
        experiment: &settings.id,
        seed: settings.seed,
        threads,
        params: &settings.values,
        verdict: report.verdict().label(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)?;
    fs::write(dir.join("table.csv"), report.table.to_csv())?;
    fs::write(dir.join("verdict.txt"), report.verdict_text())?;
    Ok(())
}

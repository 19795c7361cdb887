mod config;
mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wasep::harness::{self, Verdict};

use config::ConfigError;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Runs one experiment from the catalog and writes manifest.json, table.csv
/// and verdict.txt.
#[derive(Parser, Debug)]
#[command(name = "wasep", version)]
struct Cli {
    /// Experiment id (see --list).
    #[arg(long)]
    exp: Option<String>,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Flat key=value file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Artifact directory, created if missing.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed; replica k uses stream k.
    #[arg(long)]
    seed: Option<u64>,
    /// Shorthand for --set replicas=N.
    #[arg(long)]
    replicas: Option<usize>,
    /// Worker threads; verdicts do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Print the experiment catalog and exit.
    #[arg(long)]
    list: bool,
}

// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn list() -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    for e in harness::catalog() {
        let kind = if e.gating { "gate" } else { "report" };
        writeln!(out, "{} [{kind}]: {}", e.id, e.summary)?;
        for k in e.keys {
            writeln!(out, "    {}={}  {}", k.key, k.default, k.help)?;
        }
    }
    Ok(())
}

fn flag_pairs(cli: &Cli) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut m = BTreeMap::new();
    for s in &cli.set {
        let Some((k, v)) = s.split_once('=').filter(|(k, _)| !k.is_empty()) else {
            return Err(ConfigError::Syntax {
                path: PathBuf::from("--set"),
                line: 1,
                token: s.clone(),
            });
        };
        m.insert(k.to_string(), v.to_string());
    }
    let named = [
        ("exp", cli.exp.clone()),
        ("seed", cli.seed.map(|v| v.to_string())),
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("replicas", cli.replicas.map(|v| v.to_string())),
        ("threads", cli.threads.map(|v| v.to_string())),
    ];
    for (k, v) in named {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    }
    Ok(m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        let _ = list();
        return ExitCode::SUCCESS;
    }
    let cfg = (|| {
        let file = match &cli.config {
            Some(p) => config::read_file(p)?,
            None => BTreeMap::new(),
        };
        config::resolve(file, flag_pairs(&cli)?)
    })();
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("config error: threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let report = match harness::run(&cfg.settings) {
        Ok(r) => r,
        Err(e) if e.is_config() => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    if let Err(e) = output::write_run(&cfg.out, &cfg.settings, cfg.threads, &report) {
        eprintln!("i/o error writing {}: {e}", cfg.out.display());
        return ExitCode::from(EXIT_IO);
    }
    print!("{}", report.verdict_text());
    match report.verdict() {
        Verdict::Pass | Verdict::Report => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(EXIT_FAIL),
    }
}

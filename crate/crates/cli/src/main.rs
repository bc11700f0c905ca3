use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use innodict_core::calibration::run_calibrations;
use innodict_core::io::config::{load_config, GenerateConfig, ScaleConfig, TraceConfig};
use innodict_core::io::dictionary_file::dictionary_to_string;
use innodict_core::io::manifest::{unix_now, RunManifest};
use innodict_core::io::table::{scale_table, trace_table};
use innodict_core::{generate, run_grid, run_trace_experiment, Error, Normalization, World};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_SELFTEST: u8 = 4;

#[derive(Parser)]
#[command(
    name = "innodict",
    version,
    about = "Innovation-space dictionary simulations"
)]
struct Cli {
    /// Worker threads (falls back to INNODICT_THREADS, then all cores).
    #[arg(long, global = true, env = "INNODICT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write one dictionary file (plus `<out>.manifest.json`).
    Generate(RunArgs),
    /// Write per-step CSVs for each strategy and order into a directory.
    Trace(RunArgs),
    /// Run ensembles over a parameter grid and write one CSV.
    Scale(RunArgs),
    /// Run the calibration suite.
    Selftest {
        /// Print the report as JSON lines.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return fail(EXIT_RUNTIME, "runtime", &e.to_string());
        }
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Scale(a) => cmd_scale(&a),
        Command::Selftest { json } => return cmd_selftest(json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_config() => fail(EXIT_CONFIG, "config", &e.to_string()),
        Err(e) => fail(EXIT_RUNTIME, "runtime", &e.to_string()),
    }
}

fn fail(code: u8, kind: &str, message: &str) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
    ExitCode::from(code)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn cmd_generate(a: &RunArgs) -> Result<(), Error> {
    let started = unix_now();
    let cfg: GenerateConfig = load_config(&a.config, a.seed)?;
    cfg.generator.validate()?;
    let dictionary = match generate(&cfg.generator)? {
        World::Real(d) => d,
        World::Null(_) => {
            return Err(Error::Unsupported(
                "the null model has no word list to write".into(),
            ))
        }
    };
    let text = dictionary_to_string(&dictionary);
    std::fs::write(&a.out, &text)?;

    let mut manifest = RunManifest::new(
        "generate",
        serde_json::to_value(&cfg)?,
        cfg.generator.seed,
        started,
    );
    manifest.warnings = cfg.generator.warnings();
    manifest.record(&file_name(&a.out), text.as_bytes(), None);
    manifest.write(&with_suffix(&a.out, ".manifest.json"))
}

fn cmd_trace(a: &RunArgs) -> Result<(), Error> {
    let started = unix_now();
    let cfg: TraceConfig = load_config(&a.config, a.seed)?;
    cfg.generator.validate()?;
    if cfg.strategies.is_empty() {
        return Err(Error::Config("strategies must not be empty".into()));
    }
    let bundle = run_trace_experiment(
        &cfg.generator,
        &cfg.strategies,
        cfg.n_random_orders,
        cfg.occurrence,
    )?;
    std::fs::create_dir_all(&a.out)?;

    let mut manifest = RunManifest::new(
        "trace",
        serde_json::to_value(&cfg)?,
        cfg.generator.seed,
        started,
    );
    manifest.warnings = cfg.generator.warnings();
    let dict_text = dictionary_to_string(&bundle.dictionary);
    std::fs::write(a.out.join("dictionary.txt"), &dict_text)?;
    manifest.record("dictionary.txt", dict_text.as_bytes(), None);
    for run in &bundle.runs {
        let table = trace_table(run);
        let name = format!("{}_{}.csv", run.strategy.tag(), run.order_index);
        let csv = table.to_csv_string();
        std::fs::write(a.out.join(&name), &csv)?;
        manifest.record(&name, csv.as_bytes(), Some(table.columns().to_vec()));
    }
    manifest.write(&a.out.join("manifest.json"))
}

fn cmd_scale(a: &RunArgs) -> Result<(), Error> {
    let started = unix_now();
    let cfg: ScaleConfig = load_config(&a.config, a.seed)?;
    let grid = cfg.grid_spec()?;
    let rows = run_grid(&grid)?;
    let table = scale_table(&grid, &rows);
    let csv = table.to_csv_string();
    std::fs::write(&a.out, &csv)?;

    let mut manifest = RunManifest::new(
        "scale",
        serde_json::to_value(&cfg)?,
        cfg.generator.seed,
        started,
    );
    manifest.warnings = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().err())
        .map(|e| format!("cell failed: {e}"))
        .collect();
    manifest.record(
        &file_name(&a.out),
        csv.as_bytes(),
        Some(table.columns().to_vec()),
    );
    manifest.write(&with_suffix(&a.out, ".manifest.json"))
}

fn cmd_selftest(json: bool) -> ExitCode {
    let checks = run_calibrations(Normalization::default());
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        if json {
            println!("{}", serde_json::to_string(c).expect("check serializes"));
        } else {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            println!("[{mark}] {:<40} {}", c.name, c.detail);
        }
    }
    if !json {
        println!("{} checks, {} failed", checks.len(), failed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SELFTEST)
    }
}

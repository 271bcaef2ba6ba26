use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radlab::lab::{
    run_many, save_report, ColourRecord, ExperimentId, Format, LabConfig, LabError, Params,
};

#[derive(Debug, Parser)]
#[command(name = "radlab", version, about = "Experiments on weighted shifts over the free semigroup tree")]
struct Cli {
    /// TOML file with max_len_cap, norm_tol, suite_tol, seed, out_dir, format.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed, decimal or 0x-prefixed hex.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Experiments run in parallel with `run all`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Tolerance for norm comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print every experiment with the statement it checks.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Length, depth, colour and weights of a word.
    Colour { word: String },
    /// Run an experiment (or `all`) with key=value parameters.
    Run {
        id: String,
        params: Vec<String>,
    },
}

fn parse_seed(text: &str) -> Result<u64, String> {
    let parsed = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

fn config(cli: &Cli) -> Result<LabConfig, LabError> {
    let mut config = match &cli.config {
        Some(path) => LabConfig::load(path)?,
        None => LabConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    if let Some(tol) = cli.tol {
        config.suite_tol = tol;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<ExitCode, LabError> {
    if cli.list {
        for id in ExperimentId::ALL {
            println!("{:<13} {}", id.name(), id.anchor());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = &cli.command else {
        return Err(LabError::Usage("expected a subcommand or --list; see --help".into()));
    };
    match command {
        Command::Colour { word } => {
            let record = ColourRecord::new(word).map_err(|e| LabError::Usage(e.to_string()))?;
            println!("{record}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { id, params } => {
            let config = config(cli)?;
            let params = Params::parse(params)?;
            let ids = if id == "all" {
                if params != Params::default() {
                    return Err(LabError::Usage("`run all` takes no parameters".into()));
                }
                ExperimentId::ALL.to_vec()
            } else {
                vec![id.parse()?]
            };
            let mut worst = 0u8;
            for (id, result) in ids.iter().zip(run_many(&ids, &params, &config, cli.jobs)) {
                match result {
                    Ok(report) => {
                        let paths = save_report(&config.out_dir, &report, config.format)?;
                        let verdict = if report.passed() { "PASS" } else { "FAIL" };
                        let files: Vec<_> = paths.iter().map(|p| p.display().to_string()).collect();
                        println!("{verdict} {id} -> {}", files.join(", "));
                        for failure in &report.failures {
                            eprintln!("{id}: {failure}");
                        }
                        if !report.passed() {
                            worst = worst.max(1);
                        }
                    }
                    Err(e) => {
                        eprintln!("{id}: {e}");
                        worst = worst.max(e.exit_code() as u8);
                    }
                }
            }
            Ok(ExitCode::from(worst))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

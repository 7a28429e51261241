use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ltphi::{run_herr, run_verify, CliError, ModuleSpec, RunConfig};

#[derive(Parser)]
#[command(name = "ltphi", version, about = "Verification suites and Herr cohomology for Lubin-Tate (phi, Gamma)-modules")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        suite: String,
        /// Overrides the seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohomology report of a module.
    Herr {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(&p, text).map_err(|e| CliError::Internal(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Verify { config, suite, seed, out } => {
            let mut cfg = RunConfig::from_json(&read(&config)?)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = out.or(cfg.out.clone().map(PathBuf::from));
            let report = run_verify(&cfg, &suite)?;
            emit(&report.to_json(), out)?;
            Ok(report.passed())
        }
        Cmd::Herr { config, module, out } => {
            let cfg = RunConfig::from_json(&read(&config)?)?;
            let spec = ModuleSpec::from_json(&read(&module)?)?;
            let out = out.or(cfg.out.clone().map(PathBuf::from));
            let (report, ok) = run_herr(&cfg, &spec)?;
            emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"), out)?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ltphi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

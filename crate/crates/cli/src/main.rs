use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hgdyn_cli::report::Format;
use hgdyn_cli::{execute, CliError, Invocation};

#[derive(Parser, Debug)]
#[command(name = "hgdyn", version, about = "Weighted translations on discrete hypergroups")]
struct Cli {
    /// Scenario file (TOML, or JSON with a .json extension).
    #[arg(long)]
    scenario: PathBuf,
    /// axioms, haar, norm, aperiodic, probe, witness or orbit.
    #[arg(long)]
    command: String,
    /// Comma separated command arguments.
    #[arg(long, value_delimiter = ',')]
    args: Vec<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "records")]
    format: Format,
    /// Seed for randomized probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let inv = Invocation {
        scenario: &cli.scenario,
        command: &cli.command,
        args: &cli.args,
        format: cli.format,
        seed: cli.seed,
    };
    let result = execute(&inv).and_then(|ex| {
        match &cli.out {
            Some(path) => {
                std::fs::write(path, &ex.output).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
            }
            None => print!("{}", ex.output),
        }
        Ok(ex.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("hgdyn: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

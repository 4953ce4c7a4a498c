use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polproj_cli::{canonical, error_code, exit_code, group, render_json, render_text, verify_all, CliError};
use polproj_core::verify::{ModeChoice, Report, RunConfig};

#[derive(Parser)]
#[command(name = "polproj", version, about = "Projectivity groups of finite classical polar spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Orders of Π and Π⁺ for a residue, with catalog matches
    Group {
        spec: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a check (or `all`) on one or more specs
    Verify {
        check: String,
        #[arg(required = true)]
        specs: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Echo the canonical form of a spec
    Parse { spec: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "POLPROJ_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = polproj_core::polar::DEFAULT_POINT_CAP)]
    cap_points: usize,
    #[arg(long, default_value_t = 5000)]
    cap_nodes: usize,
    #[arg(long)]
    mode: Option<ModeArg>,
    /// Sample count for configuration checks
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Consecutive stable batches before sampling stops
    #[arg(long, default_value_t = 5)]
    stable_batches: usize,
    /// Record wall-clock milliseconds in reports
    #[arg(long)]
    timing: bool,
    /// Write the JSON report to a file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of text
    #[arg(long)]
    json: bool,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            point_cap: self.cap_points,
            node_cap: self.cap_nodes,
            mode: match self.mode {
                None => ModeChoice::Auto,
                Some(ModeArg::Exhaustive) => ModeChoice::Exhaustive,
                Some(ModeArg::Sampled) => ModeChoice::Sampled,
            },
            samples: self.samples,
            stable_batches: self.stable_batches,
            timing: self.timing,
            ..RunConfig::default()
        }
    }

    fn emit(&self, runs: &[Report]) -> Result<(), CliError> {
        let json = render_json(runs);
        if let Some(p) = &self.out {
            std::fs::write(p, format!("{json}\n")).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        let text = if self.json { format!("{json}\n") } else { render_text(runs) };
        match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
            _ => Ok(()),
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Parse { spec } => {
            println!("{}", canonical(&spec)?);
            Ok(0)
        }
        Cmd::Group { spec, run } => {
            let runs = vec![group(&spec, &run.config())?];
            run.emit(&runs)?;
            Ok(exit_code(&runs))
        }
        Cmd::Verify { check, specs, run } => {
            let runs = verify_all(&check, &specs, &run.config())?;
            run.emit(&runs)?;
            Ok(exit_code(&runs))
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    };
    ExitCode::from(code as u8)
}

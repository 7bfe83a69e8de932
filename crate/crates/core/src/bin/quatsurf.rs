use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use quatsurf::io::{cmd_darboux, cmd_invariants, cmd_surface, cmd_sweep, RunConfig, Scene};
use quatsurf::{QsError, QsResult};

/// Quaternionic transforms of CMC and isothermic surfaces.
#[derive(Parser, Debug)]
#[command(name = "quatsurf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "QUATSURF_THREADS")]
    threads: Option<usize>,
    /// Report progress and written files on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Mesh of the configured surface and its requested derived surfaces.
    Surface,
    /// Meshes and diagnostics of the configured transform pipeline.
    Darboux,
    /// CSV multiplier map over the configured ϱ-window.
    Sweep,
    /// JSON report of the invariant suite (the configuration is optional).
    Invariants,
}

fn scene(cli: &Cli) -> QsResult<Scene> {
    let path = cli.config.as_ref().ok_or_else(|| QsError::ConfigInvalid("--config is required for this command".into()))?;
    Scene::new(RunConfig::load(path)?)
}

fn run(cli: &Cli) -> QsResult<Vec<PathBuf>> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(QsError::ConfigInvalid("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| QsError::ConfigInvalid(e.to_string()))?;
    }
    match cli.command {
        Command::Surface => cmd_surface(&scene(cli)?, &cli.out),
        Command::Darboux => cmd_darboux(&scene(cli)?, &cli.out),
        Command::Sweep => cmd_sweep(&scene(cli)?, &cli.out),
        Command::Invariants => {
            let s = match &cli.config {
                Some(_) => Some(scene(cli)?),
                None => None,
            };
            cmd_invariants(s.as_ref(), &cli.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(files) => {
            if cli.verbose {
                for f in &files {
                    eprintln!("wrote {}", f.display());
                }
                eprintln!("{:?} finished in {:.2?}", cli.command, start.elapsed());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use objgrid_cli as cli;
use objgrid_core::{SortKey, Viewport};

#[derive(Parser)]
#[command(name = "objgrid", version, about = "Object lifecycle traces as sortable square grids")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic log from a key-value config
    Gen {
        config: PathBuf,
        /// Output CSV, `-` for stdout
        out: PathBuf,
    },
    /// Render the object grid of a log as SVG
    Render {
        /// Input CSV, `-` for stdin
        log: PathBuf,
        /// Output SVG, `-` for stdout
        out: PathBuf,
        #[arg(long, default_value = "none")]
        sort: SortKey,
        #[arg(long, default_value_t = 1024)]
        width: u32,
        #[arg(long, default_value_t = 768)]
        height: u32,
    },
    /// Print creation counts or the per-thread profile
    Stats {
        /// Input CSV, `-` for stdin
        log: PathBuf,
        #[arg(long, default_value = "class")]
        by: SortKey,
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Print created/destroyed counts per thread instead
        #[arg(long)]
        threads: bool,
    },
    /// Run the HTTP API
    Serve {
        #[arg(long, default_value_t = cli::DEFAULT_PORT)]
        port: u16,
    },
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen { config, out } => {
            let text = cli::gen(&cli::read_input(&config)?)?;
            cli::write_output(&out, &text)
        }
        Command::Render { log, out, sort, width, height } => {
            let Some(viewport) = Viewport::new(width, height) else {
                bail!("--width and --height must be at least 1");
            };
            let log = cli::load_log(&log)?;
            cli::write_output(&out, &cli::render(&log, sort, viewport))
        }
        Command::Stats { log, by, top, threads } => {
            if top == 0 {
                bail!("--top must be at least 1");
            }
            let log = cli::load_log(&log)?;
            let text = if threads { cli::threads(&log) } else { cli::stats(&log, by, top)? };
            cli::write_output(std::path::Path::new("-"), &text)
        }
        Command::Serve { port } => {
            tracing_subscriber::fmt().with_writer(std::io::stderr).init();
            cli::serve(port)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

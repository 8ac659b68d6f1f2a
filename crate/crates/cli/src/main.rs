use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rpn_cli::commands::{self, Status, Theorem, Usage};
use rpn_cli::server;
use rpn_core::explorer::{ExploreMode, Property};
use rpn_core::interface::session::Session;
use rpn_core::model::Mode;

/// Reversing Petri nets: validate, execute, explore and check nets.
#[derive(Parser)]
#[command(name = "rpn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a net file for syntax and well-formedness.
    Validate { file: PathBuf },
    /// Execute a trace and print the final state as JSON.
    Run {
        file: PathBuf,
        /// Comma-separated actions: `t` fires, `~t:bt|co|o` reverses.
        #[arg(long, allow_hyphen_values = true)]
        trace: String,
        /// Mode for reversals written without one.
        #[arg(long, default_value = "co")]
        mode: Mode,
    },
    /// Step through a net interactively.
    Step {
        file: PathBuf,
        #[arg(long, default_value = "co")]
        mode: Mode,
    },
    /// Enumerate reachable states and optionally check properties on them.
    Explore {
        file: PathBuf,
        #[arg(long, default_value = "co")]
        mode: ExploreMode,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Comma-separated property names.
        #[arg(long, value_delimiter = ',')]
        check: Vec<Property>,
    },
    /// Check an equivalence result or property over all short executions.
    Check {
        file: PathBuf,
        #[arg(long)]
        theorem: Theorem,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Serve an interactive session over HTTP.
    Serve {
        file: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<Status> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = match command {
        Command::Validate { file } => commands::validate(&commands::read(&file)?, &mut out)?,
        Command::Run { file, trace, mode } => match loaded(&file, &mut out)? {
            Some((net, m0)) => commands::run(net, m0, &trace, mode, &mut out, &mut io::stderr())?,
            None => Status::Violation,
        },
        Command::Step { file, mode } => match loaded(&file, &mut out)? {
            Some((net, m0)) => commands::step(net, m0, mode, &mut io::stdin().lock(), &mut out)?,
            None => Status::Violation,
        },
        Command::Explore {
            file,
            mode,
            depth,
            check,
        } => match loaded(&file, &mut out)? {
            Some((net, m0)) => commands::explore_cmd(&net, &m0, mode, depth, &check, &mut out)?,
            None => Status::Violation,
        },
        Command::Check { file, theorem, max_len } => match loaded(&file, &mut out)? {
            Some((net, m0)) => commands::check(&net, &m0, theorem, max_len, &mut out)?,
            None => Status::Violation,
        },
        Command::Serve { file, port } => match loaded(&file, &mut out)? {
            Some((net, m0)) => {
                drop(out);
                let runtime = tokio::runtime::Runtime::new()?;
                runtime
                    .block_on(server::serve(Session::new(net, m0), port))
                    .map_err(|e| Usage(format!("cannot serve on port {port}: {e}")))?;
                return Ok(Status::Pass);
            }
            None => Status::Violation,
        },
    };
    out.flush()?;
    Ok(status)
}

fn loaded(file: &Path, out: &mut dyn Write) -> anyhow::Result<Option<(rpn_core::Net, rpn_core::Marking)>> {
    commands::load(&commands::read(file)?, out)
}

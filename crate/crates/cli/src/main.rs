//! `triaxis` command-line front end.
//!
//! Exit codes: 0 success, 1 parse/validation/reference/usage error,
//! 2 infeasible result, 3 internal error. Errors go to stderr as a single
//! `error:<category>: <message>` line.

mod render;

use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use triaxis_core::commands::{self, Command};
use triaxis_core::household::CooperativeTemplate;
use triaxis_core::scenario::to_canonical_string;
use triaxis_core::{load_scenario, Category, Error, Scenario};
use triaxis_service::{ServiceConfig, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(name = "triaxis", version, about = "Career decisions on wealth, autonomy and meaning")]
struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true, env = "TRIAXIS_SCENARIO")]
    scenario: Option<PathBuf>,

    /// Print canonical JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Utility of every role under the scenario preferences.
    Score,
    /// Pareto frontier of the roles.
    Frontier,
    /// Year-by-year trajectory of a named plan.
    Simulate {
        #[arg(long)]
        plan: String,
    },
    /// Roles meeting the thresholds, with relaxation advice if none do.
    Satisfice,
    /// Sequential versus simultaneous strategy under risk.
    Strategy,
    /// Option value of a specialized against a generalized plan.
    Options {
        #[arg(long)]
        specialized: String,
        #[arg(long)]
        generalized: String,
    },
    /// Household equilibria, optionally under a cooperative template.
    Household {
        /// sequential_focus, risk_hedging or geographic_bundling.
        #[arg(long)]
        template: Option<CooperativeTemplate>,
    },
    /// Built-in archetype table and transition costs.
    Archetypes,
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Extra allowed CORS origin (repeatable).
        #[arg(long = "allow-origin")]
        allow_origin: Vec<String>,
    },
}

fn exit_code(category: Category) -> u8 {
    match category {
        Category::Parse | Category::Validation | Category::Reference => 1,
        Category::Infeasible => 2,
        Category::Internal => 3,
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error:{}: {}", err.category(), err);
    ExitCode::from(exit_code(err.category()))
}

fn read_scenario(path: Option<&PathBuf>) -> Result<Scenario, Error> {
    let path = path.ok_or_else(|| {
        Error::validation("scenario", "no scenario given (use --scenario or TRIAXIS_SCENARIO)")
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::validation("scenario", format!("cannot read {}: {e}", path.display())))?;
    load_scenario(&text)
}

fn emit(value: &Value, json: bool, human: impl FnOnce() -> String) -> Result<(), Error> {
    if json {
        print!("{}", to_canonical_string(value)?);
    } else {
        print!("{}", human());
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, Error> {
    serde_json::to_value(x).map_err(|e| Error::Internal(e.to_string()))
}

fn serve(cli: &Cli, port: u16, allowed_origins: Vec<String>) -> Result<(), Error> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let mut config = match &cli.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::validation("scenario", format!("cannot read {}: {e}", path.display()))
            })?;
            ServiceConfig::with_default_scenario(&text)?
        }
        None => ServiceConfig::default(),
    };
    config.allowed_origins = allowed_origins;
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::Internal(e.to_string()))?;
    runtime
        .block_on(triaxis_service::serve(addr, config))
        .map_err(|e| Error::Internal(format!("cannot serve on {addr}: {e}")))
}

fn run(cli: &Cli) -> Result<(), Error> {
    let command = match &cli.command {
        Cmd::Serve { port, allow_origin } => return serve(cli, *port, allow_origin.clone()),
        Cmd::Score => Command::Score,
        Cmd::Frontier => Command::Frontier,
        Cmd::Simulate { plan } => Command::Simulate { plan: plan.clone() },
        Cmd::Satisfice => Command::Satisfice,
        Cmd::Strategy => Command::Strategy,
        Cmd::Options {
            specialized,
            generalized,
        } => Command::Options {
            specialized: specialized.clone(),
            generalized: generalized.clone(),
        },
        Cmd::Household { template } => Command::Household { template: *template },
        Cmd::Archetypes => Command::Archetypes,
    };
    let scenario = match command {
        Command::Archetypes => None,
        _ => Some(read_scenario(cli.scenario.as_ref())?),
    };
    match commands::run(&command, scenario.as_ref()) {
        Ok(report) => {
            let value = to_value(&report)?;
            emit(&value, cli.json, || render::report(&report))
        }
        Err(err @ Error::Infeasible { .. }) => {
            if let Error::Infeasible { detail, .. } = &err {
                emit(detail, cli.json, || render::infeasible(detail))?;
            }
            Err(err)
        }
        Err(err) => Err(err),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error:usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

//! `stepcalc`: runs, solves, checks and formats step programs through the
//! HTTP service. Without `--server` an embedded server is started on a
//! loopback port for the duration of the command.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stepcalc_client::Client;
use stepcalc_service::{spawn_background, AppState};

#[derive(Parser)]
#[command(name = "stepcalc", version, about = "Step programs with exact arithmetic")]
struct Cli {
    /// Service to talk to, e.g. http://127.0.0.1:8080.
    #[arg(long, global = true, env = "STEPCALC_SERVER")]
    server: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate with the given numbers and print every step.
    Run {
        file: PathBuf,
        /// Replace a declaration's value, e.g. `--set C="48 cherry"`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// Replace declarations by symbols and print the resulting formula.
    Solve {
        file: PathBuf,
        #[arg(long = "let", value_name = "NAME", required = true)]
        symbols: Vec<String>,
    },
    /// Check helpful-number independence and value/formula agreement.
    /// Exits with status 1 if the check fails.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the program in canonical layout.
    Fmt {
        file: PathBuf,
        /// Rewrite the file in place.
        #[arg(long)]
        write: bool,
    },
    /// Run the HTTP service in the foreground.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn read(file: &PathBuf) -> Result<String, String> {
    fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))
}

fn connect(server: Option<String>) -> Result<Client, String> {
    match server {
        Some(url) => Ok(Client::new(&url)),
        None => {
            let state = AppState::new(stepcalc_service::Store::in_memory());
            let addr = spawn_background(state).map_err(|e| format!("cannot start server: {e}"))?;
            Ok(Client::new(&format!("http://{addr}")))
        }
    }
}

fn serve(host: &str, port: u16) -> Result<(), String> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let state = AppState::from_env().await.map_err(|e| e.to_string())?;
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| format!("{host}:{port}: {e}"))?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        match state.store().dir() {
            Some(dir) => eprintln!("listening on http://{addr}, storage {}", dir.display()),
            None => eprintln!("listening on http://{addr}, in-memory storage"),
        }
        stepcalc_service::serve(listener, state)
            .await
            .map_err(|e| e.to_string())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, String> {
    if let Command::Serve { port, host } = &cli.command {
        serve(host, *port)?;
        return Ok(ExitCode::SUCCESS);
    }
    let client = connect(cli.server)?;
    let e = |e: stepcalc_client::Error| e.to_string();
    match cli.command {
        Command::Run { file, set } => {
            let mut overrides = BTreeMap::new();
            for item in set {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| format!("--set expects NAME=VALUE, got `{item}`"))?;
                overrides.insert(name.trim().to_string(), value.trim().to_string());
            }
            let trace = client.run_program(&read(&file)?, &overrides).map_err(e)?;
            print!("{}", with_newline(&trace.text));
        }
        Command::Solve { file, symbols } => {
            let symbols: BTreeSet<String> = symbols.into_iter().collect();
            let solved = client.solve(&read(&file)?, &symbols).map_err(e)?;
            print!("{}", with_newline(&solved.text));
        }
        Command::Check { file, trials, seed } => {
            let report = client.check(&read(&file)?, trials, seed).map_err(e)?;
            match (&report.independence, &report.independence_error) {
                (Some(entries), _) => {
                    for entry in entries {
                        println!("{}", entry.text);
                    }
                }
                (None, Some(err)) => println!("independence: not checked ({})", err.message),
                (None, None) => {}
            }
            let a = &report.agreement;
            println!(
                "agreement: {}/{} agreed, {} infeasible",
                a.agreed, a.requested, a.infeasible
            );
            for c in &a.counterexamples {
                println!("  counterexample: {c}");
            }
            if !a.passed {
                println!("FAIL");
                return Ok(ExitCode::from(1));
            }
            println!("ok");
        }
        Command::Fmt { file, write } => {
            let formatted = client.fmt(&read(&file)?).map_err(e)?;
            if write {
                fs::write(&file, &formatted).map_err(|err| format!("{}: {err}", file.display()))?;
            } else {
                print!("{formatted}");
            }
        }
        Command::Serve { .. } => unreachable!(),
    }
    Ok(ExitCode::SUCCESS)
}

fn with_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

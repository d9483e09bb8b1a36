//! `pddl-copilot`: check PDDL, validate and simulate plans, run planners,
//! and serve the same operations as MCP tools on stdio.
//!
//! Exit status: 0 success or valid plan, 1 negative result (failed check,
//! invalid plan, no plan), 2 usage error, 3 I/O or configuration error.

mod corpus;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pddl_copilot::mcp;
use pddl_copilot::pddl::parse_plan;
use pddl_copilot::planner::{save_plan, PlannerKind, Registry};
use pddl_copilot::tools::{self, SolveContext, Source, ToolOutput};
use serde_json::json;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pddl-copilot",
    version,
    about = "PDDL checking, plan validation, simulation and planner orchestration"
)]
struct Cli {
    /// Print the JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Planner registry (default: $PDDL_COPILOT_CONFIG).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for planner scratch directories (default: system temp).
    #[arg(long, global = true, value_name = "PATH")]
    workdir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a domain file.
    CheckDomain { domain: PathBuf },
    /// Check a problem file against its domain.
    CheckProblem { domain: PathBuf, problem: PathBuf },
    /// Validate a plan; prints VALID or INVALID with the reason.
    ValidatePlan { domain: PathBuf, problem: PathBuf, plan: PathBuf },
    /// Simulate a plan, or print one state or action of its trace (0-based).
    Simulate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        /// State index; 0 is the initial state.
        #[arg(long, value_name = "N", conflicts_with = "action")]
        state: Option<usize>,
        /// Action index; 0 is the first step.
        #[arg(long, value_name = "N")]
        action: Option<usize>,
    },
    /// Print whether the task needs a classical or a numeric planner.
    Classify { domain: PathBuf, problem: PathBuf },
    /// Run a configured planner and validate its plan.
    Solve {
        domain: PathBuf,
        problem: PathBuf,
        /// Planner kind; defaults to the classified kind.
        #[arg(long)]
        kind: Option<PlannerKind>,
        /// Also write the plan here.
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
    },
    /// Serve the tools over MCP (newline-delimited JSON-RPC on stdio).
    Serve,
    /// Round-trip, check, classify and validate every task in a corpus directory.
    Corpus { dir: PathBuf },
}

/// A failure before any tool ran.
struct Fatal(String);

fn read(path: &Path) -> Result<Source, Fatal> {
    Source::read(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))
}

fn context(cli: &Cli) -> Result<SolveContext, Fatal> {
    let registry = Registry::discover(cli.config.as_deref()).map_err(|e| Fatal(e.to_string()))?;
    Ok(SolveContext { registry, workdir: cli.workdir.clone() })
}

fn emit(json_mode: bool, out: &ToolOutput) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values print"));
    } else {
        print!("{}", out.text);
    }
}

fn run(cli: &Cli) -> Result<u8, Fatal> {
    let negative = |out: &ToolOutput| if out.is_error { EXIT_NEGATIVE } else { 0 };
    let out = match &cli.command {
        Command::CheckDomain { domain } => tools::validate_domain(&read(domain)?),
        Command::CheckProblem { domain, problem } => tools::validate_problem(&read(domain)?, &read(problem)?),
        Command::ValidatePlan { domain, problem, plan } => {
            let out = tools::validate_plan(&read(domain)?, &read(problem)?, &read(plan)?);
            emit(cli.json, &out);
            return Ok(if out.json["valid"] == true { 0 } else { EXIT_NEGATIVE });
        }
        Command::Simulate { domain, problem, plan, state, action } => {
            let (d, p, plan) = (read(domain)?, read(problem)?, read(plan)?);
            match (state, action) {
                (Some(i), _) => tools::get_state(&d, &p, &plan, *i),
                (_, Some(i)) => tools::get_action(&d, &p, &plan, *i),
                _ => tools::simulate_plan(&d, &p, &plan),
            }
        }
        Command::Classify { domain, problem } => tools::classify(&read(domain)?, &read(problem)?),
        Command::Solve { domain, problem, kind, save } => {
            let ctx = context(cli)?;
            let mut out = tools::solve(&read(domain)?, &read(problem)?, *kind, &ctx);
            if let (Some(path), false) = (save, out.is_error) {
                let plan_text = out.json["plan"].as_str().unwrap_or_default();
                let plan = parse_plan(plan_text).map_err(|_| Fatal("planner returned an unprintable plan".into()))?;
                let written = save_plan(&plan.ast, path).map_err(|e| Fatal(e.to_string()))?;
                out.text.push_str(&format!("Saved plan to {}\n", written.display()));
                out.json["saved_to"] = json!(written);
            }
            emit(cli.json, &out);
            let valid = out.json["validated"]["valid"] == true;
            return Ok(if valid { 0 } else { EXIT_NEGATIVE });
        }
        Command::Serve => {
            let ctx = context(cli)?;
            let status = mcp::serve(io::stdin().lock(), io::stdout().lock(), &ctx);
            return Ok(if status == 0 { 0 } else { EXIT_IO });
        }
        Command::Corpus { dir } => {
            let report = corpus::run(dir).map_err(|e| Fatal(format!("cannot read corpus {}: {e}", dir.display())))?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("JSON values print"));
            } else {
                print!("{}", report.to_text());
            }
            return Ok(if report.ok { 0 } else { EXIT_NEGATIVE });
        }
    };
    emit(cli.json, &out);
    Ok(negative(&out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(Fatal(message)) => {
            if cli.json {
                let out = ToolOutput::error("io-error", message, &[]);
                emit(true, &out);
            } else {
                let _ = writeln!(io::stderr(), "error: {message}");
            }
            EXIT_IO
        }
    };
    let _ = io::stdout().flush();
    ExitCode::from(code)
}

use std::fs::{self, File};
use std::io;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::classify::{classify, PlannerKind};
use super::config::{OutputParser, PlannerConfig, Registry};
use super::output::{parse_planner_output, NoPlanFound};
use crate::check::{check_domain, check_problem};
use crate::diagnostic::Diagnostic;
use crate::pddl::{parse_domain_in, parse_problem_in, print_plan, Domain, Plan, Problem};
use crate::validate::{validate_plan, ValidateError, ValidationReport};

const POLL_INTERVAL: Duration = Duration::from_millis(10);
const EXCERPT_BYTES: usize = 2000;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("no {kind} planner is configured (set --config or PDDL_COPILOT_CONFIG)")]
    NotConfigured { kind: PlannerKind },
    #[error("planner '{planner}' timed out after {timeout_seconds} s; partial output in {}", raw_output_path.display())]
    Timeout { planner: String, timeout_seconds: u64, raw_output_path: PathBuf },
    #[error("planner '{planner}' exited with {status}: {stderr_excerpt}")]
    ExitNonzero { planner: String, status: String, stderr_excerpt: String, raw_output_path: PathBuf },
    #[error("planner '{planner}' returned no plan: {}", detail.message)]
    NoPlanFound { planner: String, detail: NoPlanFound, raw_output_path: PathBuf },
    #[error("the domain or problem is invalid ({} error(s))", .0.iter().filter(|d| d.is_error()).count())]
    InvalidInput(Vec<Diagnostic>),
    #[error("{context}: {message}")]
    Io { context: String, message: String },
}

impl PlannerError {
    pub fn code(&self) -> &'static str {
        match self {
            PlannerError::NotConfigured { .. } => "planner-not-configured",
            PlannerError::Timeout { .. } => "planner-timeout",
            PlannerError::ExitNonzero { .. } => "planner-exit-nonzero",
            PlannerError::NoPlanFound { .. } => "no-plan-found",
            PlannerError::InvalidInput(_) => "invalid-input",
            PlannerError::Io { .. } => "io-error",
        }
    }

    fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> PlannerError {
        let context = context.into();
        move |e| PlannerError::Io { context, message: e.to_string() }
    }
}

/// JSON: `{code, message, raw_output_path?, diagnostics}`.
impl Serialize for PlannerError {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (raw, diagnostics): (Option<&PathBuf>, &[Diagnostic]) = match self {
            PlannerError::Timeout { raw_output_path, .. } | PlannerError::ExitNonzero { raw_output_path, .. } => {
                (Some(raw_output_path), &[])
            }
            PlannerError::NoPlanFound { raw_output_path, detail, .. } => (Some(raw_output_path), &detail.diagnostics),
            PlannerError::InvalidInput(d) => (None, d),
            _ => (None, &[]),
        };
        let mut s = serializer.serialize_struct("PlannerError", 4)?;
        s.serialize_field("code", self.code())?;
        s.serialize_field("message", &self.to_string())?;
        s.serialize_field("raw_output_path", &raw)?;
        s.serialize_field("diagnostics", diagnostics)?;
        s.end()
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub plan: Plan,
    pub planner_name: String,
    pub kind: PlannerKind,
    /// Seconds between launching the planner and its exit.
    pub wall_time: f64,
    pub validated: ValidationReport,
    /// Captured planner stdout. Stderr sits next to it in `planner.stderr.log`.
    pub raw_output_path: PathBuf,
}

/// JSON: `{planner_name, kind, plan, wall_time, validated, raw_output_path}`
/// where `plan` is the canonical plan text.
impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SolveResult", 6)?;
        s.serialize_field("planner_name", &self.planner_name)?;
        s.serialize_field("kind", &self.kind)?;
        s.serialize_field("plan", &print_plan(&self.plan))?;
        s.serialize_field("wall_time", &self.wall_time)?;
        s.serialize_field("validated", &self.validated)?;
        s.serialize_field("raw_output_path", &self.raw_output_path)?;
        s.end()
    }
}

/// Parses and checks a domain/problem pair given as text.
pub fn load_task(domain_text: &str, problem_text: &str) -> Result<(Domain, Problem), PlannerError> {
    let domain = parse_domain_in(domain_text, "domain.pddl").map_err(PlannerError::InvalidInput)?.ast;
    let problem = parse_problem_in(problem_text, "problem.pddl").map_err(PlannerError::InvalidInput)?.ast;
    let mut diagnostics = check_domain(&domain).diagnostics;
    diagnostics.extend(check_problem(&domain, &problem).diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(PlannerError::InvalidInput(diagnostics));
    }
    Ok((domain, problem))
}

/// Runs the first configured planner of `kind` (default: [`classify`]) on
/// the task and validates whatever plan it returns.
///
/// Inputs and outputs live in a fresh `pddl-copilot-*` directory under
/// `workdir` (default: the system temp dir) that is kept after the call.
pub fn solve(
    domain_text: &str,
    problem_text: &str,
    kind: Option<PlannerKind>,
    registry: &Registry,
    workdir: Option<&Path>,
) -> Result<SolveResult, PlannerError> {
    let (domain, problem) = load_task(domain_text, problem_text)?;
    let kind = kind.unwrap_or_else(|| classify(&domain, &problem));
    let planner = registry.for_kind(kind).ok_or(PlannerError::NotConfigured { kind })?;

    let root = workdir.map(Path::to_path_buf).unwrap_or_else(std::env::temp_dir);
    let scratch = tempfile::Builder::new()
        .prefix("pddl-copilot-")
        .tempdir_in(&root)
        .map_err(PlannerError::io(format!("cannot create scratch directory in {}", root.display())))?
        .keep();
    let domain_path = scratch.join("domain.pddl");
    let problem_path = scratch.join("problem.pddl");
    let plan_path = scratch.join("plan.txt");
    fs::write(&domain_path, domain_text).map_err(PlannerError::io(domain_path.display().to_string()))?;
    fs::write(&problem_path, problem_text).map_err(PlannerError::io(problem_path.display().to_string()))?;

    let run = run_planner(planner, &scratch, &domain_path, &problem_path, &plan_path)?;
    let raw_output_path = run.stdout_path.clone();
    let (bytes, source) = match planner.output_parser {
        OutputParser::PlanFile => (fs::read(&plan_path).unwrap_or_default(), plan_path.display().to_string()),
        _ => (
            fs::read(&run.stdout_path).map_err(PlannerError::io(run.stdout_path.display().to_string()))?,
            run.stdout_path.display().to_string(),
        ),
    };
    let plan = parse_planner_output(&bytes, planner.output_parser, &source).map_err(|detail| {
        PlannerError::NoPlanFound { planner: planner.name.clone(), detail, raw_output_path: raw_output_path.clone() }
    })?;
    let validated = validate_plan(&domain, &problem, &plan).map_err(|e| match e {
        ValidateError::InvalidInput(d) => PlannerError::InvalidInput(d),
    })?;
    Ok(SolveResult {
        plan,
        planner_name: planner.name.clone(),
        kind,
        wall_time: run.wall_time.as_secs_f64(),
        validated,
        raw_output_path,
    })
}

struct Run {
    stdout_path: PathBuf,
    wall_time: Duration,
}

fn substitute(arg: &str, domain: &Path, problem: &Path, plan_out: &Path) -> String {
    arg.replace("{domain}", &domain.display().to_string())
        .replace("{problem}", &problem.display().to_string())
        .replace("{plan_out}", &plan_out.display().to_string())
}

fn run_planner(
    planner: &PlannerConfig,
    scratch: &Path,
    domain: &Path,
    problem: &Path,
    plan_out: &Path,
) -> Result<Run, PlannerError> {
    let stdout_path = scratch.join("planner.log");
    let stderr_path = scratch.join("planner.stderr.log");
    let stdout = File::create(&stdout_path).map_err(PlannerError::io(stdout_path.display().to_string()))?;
    let stderr = File::create(&stderr_path).map_err(PlannerError::io(stderr_path.display().to_string()))?;
    let argv: Vec<String> = planner.command.iter().map(|a| substitute(a, domain, problem, plan_out)).collect();

    let mut command = Command::new(&argv[0]);
    command
        .args(&argv[1..])
        .current_dir(planner.working_dir.as_deref().unwrap_or(scratch))
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr)
        .process_group(0);
    let start = Instant::now();
    let mut child =
        command.spawn().map_err(PlannerError::io(format!("cannot launch planner '{}' ({})", planner.name, argv[0])))?;
    let timeout = Duration::from_secs(planner.timeout_seconds);

    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {}
            Err(e) => {
                kill_group(&mut child);
                return Err(PlannerError::io(format!("waiting for planner '{}'", planner.name))(e));
            }
        }
        let elapsed = start.elapsed();
        if elapsed >= timeout {
            kill_group(&mut child);
            return Err(PlannerError::Timeout {
                planner: planner.name.clone(),
                timeout_seconds: planner.timeout_seconds,
                raw_output_path: stdout_path,
            });
        }
        thread::sleep(POLL_INTERVAL.min(timeout - elapsed));
    };
    let wall_time = start.elapsed();
    // Helpers the planner left running in its group must not outlive it.
    kill_group(&mut child);

    if !status.success() {
        let mut excerpt = tail(&stderr_path);
        if excerpt.is_empty() {
            excerpt = tail(&stdout_path);
        }
        return Err(PlannerError::ExitNonzero {
            planner: planner.name.clone(),
            status: status.to_string(),
            stderr_excerpt: excerpt,
            raw_output_path: stdout_path,
        });
    }
    Ok(Run { stdout_path, wall_time })
}

/// Kills every process in the child's process group and reaps the child.
fn kill_group(child: &mut Child) {
    if let Ok(pgid) = i32::try_from(child.id()) {
        // SAFETY: kill(2) has no memory-safety preconditions. The group id is
        // the child's pid because it was spawned with process_group(0).
        unsafe {
            libc::kill(-pgid, libc::SIGKILL);
        }
    }
    let _ = child.wait();
}

fn tail(path: &Path) -> String {
    let bytes = fs::read(path).unwrap_or_default();
    let start = bytes.len().saturating_sub(EXCERPT_BYTES);
    String::from_utf8_lossy(&bytes[start..]).trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::config::OutputParser;

    const DOMAIN: &str = "(define (domain d) (:predicates (p ?x) (q ?x))
        (:action go :parameters (?x) :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))";
    const PROBLEM: &str = "(define (problem t) (:domain d) (:objects a) (:init (p a)) (:goal (q a)))";

    fn stub(script: &str, parser: OutputParser, timeout: u64) -> Registry {
        Registry::new(vec![PlannerConfig {
            name: "stub".into(),
            kind: PlannerKind::Classical,
            command: vec![
                "sh".into(),
                "-c".into(),
                script.into(),
                "stub".into(),
                "{domain}".into(),
                "{problem}".into(),
                "{plan_out}".into(),
            ],
            output_parser: parser,
            timeout_seconds: timeout,
            working_dir: None,
        }])
        .unwrap()
    }

    #[test]
    fn stdout_stub_is_validated() {
        let dir = tempfile::tempdir().unwrap();
        let r = stub("test -f \"$1\" && test -f \"$2\" && echo '(go a)'", OutputParser::StdoutLines, 5);
        let res = solve(DOMAIN, PROBLEM, None, &r, Some(dir.path())).unwrap();
        assert_eq!(res.planner_name, "stub");
        assert_eq!(res.kind, PlannerKind::Classical);
        assert!(res.validated.valid);
        assert!(res.raw_output_path.starts_with(dir.path()));
        assert_eq!(fs::read_to_string(&res.raw_output_path).unwrap(), "(go a)\n");
    }

    #[test]
    fn plan_file_stub() {
        let dir = tempfile::tempdir().unwrap();
        let r = stub("printf '(go a)\\n; cost = 1\\n' > \"$3\"", OutputParser::PlanFile, 5);
        let res = solve(DOMAIN, PROBLEM, None, &r, Some(dir.path())).unwrap();
        assert_eq!(res.plan.len(), 1);
        assert!(res.validated.valid);
    }

    #[test]
    fn invalid_plan_is_still_returned() {
        let dir = tempfile::tempdir().unwrap();
        let r = stub("echo '(go a)'; echo '(go a)'", OutputParser::StdoutLines, 5);
        let res = solve(DOMAIN, PROBLEM, None, &r, Some(dir.path())).unwrap();
        assert!(!res.validated.valid);
        assert_eq!(res.validated.failure.as_ref().unwrap().step, 1);
    }

    #[test]
    fn empty_output_is_no_plan_found() {
        let dir = tempfile::tempdir().unwrap();
        let r = stub("true", OutputParser::StdoutLines, 5);
        let err = solve(DOMAIN, PROBLEM, None, &r, Some(dir.path())).unwrap_err();
        assert_eq!(err.code(), "no-plan-found");
    }

    #[test]
    fn nonzero_exit_carries_stderr() {
        let dir = tempfile::tempdir().unwrap();
        let r = stub("echo 'out of memory' >&2; exit 3", OutputParser::StdoutLines, 5);
        match solve(DOMAIN, PROBLEM, None, &r, Some(dir.path())).unwrap_err() {
            PlannerError::ExitNonzero { stderr_excerpt, .. } => assert_eq!(stderr_excerpt, "out of memory"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn timeout_keeps_partial_output() {
        let dir = tempfile::tempdir().unwrap();
        let r = stub("echo partial; sleep 30", OutputParser::StdoutLines, 1);
        let start = Instant::now();
        let err = solve(DOMAIN, PROBLEM, None, &r, Some(dir.path())).unwrap_err();
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 1.5, "took {elapsed}");
        match err {
            PlannerError::Timeout { raw_output_path, .. } => {
                assert_eq!(fs::read_to_string(raw_output_path).unwrap(), "partial\n")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_kind_is_not_configured() {
        let r = stub("true", OutputParser::StdoutLines, 1);
        let err = solve(DOMAIN, PROBLEM, Some(PlannerKind::Numeric), &r, None).unwrap_err();
        assert_eq!(err.code(), "planner-not-configured");
    }

    #[test]
    fn broken_task_is_rejected_before_launch() {
        let r = stub("true", OutputParser::StdoutLines, 1);
        let err = solve("(define (domain d)", PROBLEM, None, &r, None).unwrap_err();
        assert_eq!(err.code(), "invalid-input");
        let json = serde_json::to_value(&err).unwrap();
        assert!(!json["diagnostics"].as_array().unwrap().is_empty());
    }

    #[test]
    fn placeholders_substitute_inside_arguments() {
        let s = substitute("--in={domain}:{problem}>{plan_out}", Path::new("/d"), Path::new("/p"), Path::new("/o"));
        assert_eq!(s, "--in=/d:/p>/o");
    }
}

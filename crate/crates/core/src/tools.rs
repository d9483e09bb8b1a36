//! The toolkit operations behind both the MCP tools and the CLI
//! subcommands. Each returns a [`ToolOutput`]: a human-readable text, the
//! JSON document for machine consumers, and whether the call failed.
//!
//! Failures share one JSON shape:
//! `{"error": {"code", "message", "diagnostics": [...]}}`.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::check::{check_domain, check_problem, CheckReport};
use crate::diagnostic::Diagnostic;
use crate::pddl::{parse_domain_in, parse_plan_in, parse_problem_in, Domain, Plan, Problem};
use crate::planner::{self, save_plan as persist_plan, PlannerError, PlannerKind, Registry};
use crate::sim::{simulate, Outcome, SimError, Trace};
use crate::validate::{validate_plan as run_validation, ValidateError};

/// Input text and the name its diagnostics are attributed to (a path for
/// file inputs).
#[derive(Clone, Debug)]
pub struct Source {
    pub text: String,
    pub name: String,
}

impl Source {
    pub fn new(text: impl Into<String>, name: impl Into<String>) -> Self {
        Source { text: text.into(), name: name.into() }
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        Ok(Source::new(std::fs::read_to_string(path)?, path.display().to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToolOutput {
    pub text: String,
    pub json: Value,
    pub is_error: bool,
}

impl ToolOutput {
    fn ok(text: String, json: impl Serialize) -> Self {
        ToolOutput { text, json: to_value(json), is_error: false }
    }

    pub fn error(code: &str, message: impl Into<String>, diagnostics: &[Diagnostic]) -> Self {
        let message = message.into();
        let mut text = format!("ERROR {code}: {message}\n");
        for d in diagnostics {
            let _ = writeln!(text, "  {d}");
        }
        ToolOutput {
            text,
            json: json!({"error": {"code": code, "message": message, "diagnostics": diagnostics}}),
            is_error: true,
        }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("tool output serializes to JSON")
}

fn invalid_input(diagnostics: &[Diagnostic]) -> ToolOutput {
    let n = diagnostics.iter().filter(|d| d.is_error()).count();
    ToolOutput::error("invalid-input", format!("the inputs contain {n} error(s)"), diagnostics)
}

fn sim_error(e: &SimError) -> ToolOutput {
    ToolOutput::error(e.code(), e.to_string(), &[])
}

fn check_output(subject: &str, report: CheckReport) -> ToolOutput {
    let errors = report.errors().count();
    let warnings = report.diagnostics.len() - errors;
    let mut text = if report.ok {
        format!("OK: {subject} passed all checks ({warnings} warning(s))\n")
    } else {
        format!("FAILED: {subject} has {errors} error(s) and {warnings} warning(s)\n")
    };
    for d in &report.diagnostics {
        let _ = writeln!(text, "  {d}");
    }
    ToolOutput { text, is_error: !report.ok, json: to_value(&report) }
}

/// Parses and checks a domain.
pub fn validate_domain(domain: &Source) -> ToolOutput {
    let report = match parse_domain_in(&domain.text, &domain.name) {
        Ok(parsed) => {
            let mut diagnostics = parsed.warnings;
            diagnostics.extend(check_domain(&parsed.ast).diagnostics);
            CheckReport::from_diagnostics(diagnostics)
        }
        Err(diagnostics) => CheckReport::from_diagnostics(diagnostics),
    };
    check_output("the domain", report)
}

/// Parses both files, checks the domain and then the problem against it.
pub fn validate_problem(domain: &Source, problem: &Source) -> ToolOutput {
    let mut diagnostics = Vec::new();
    let d = parse_domain_in(&domain.text, &domain.name);
    let p = parse_problem_in(&problem.text, &problem.name);
    match (d, p) {
        (Ok(d), Ok(p)) => {
            diagnostics.extend(d.warnings);
            diagnostics.extend(p.warnings);
            diagnostics.extend(check_domain(&d.ast).diagnostics);
            diagnostics.extend(check_problem(&d.ast, &p.ast).diagnostics);
        }
        (d, p) => {
            for r in [d.map(|x| x.warnings), p.map(|x| x.warnings)] {
                diagnostics.extend(r.unwrap_or_else(|e| e));
            }
        }
    }
    check_output("the problem", CheckReport::from_diagnostics(diagnostics))
}

struct Task {
    domain: Domain,
    problem: Problem,
    plan: Plan,
}

/// Parses and checks all inputs; any error becomes an `invalid-input` output.
fn load(domain: &Source, problem: &Source, plan: Option<&Source>) -> Result<Task, ToolOutput> {
    let mut errors = Vec::new();
    let d = parse_domain_in(&domain.text, &domain.name).map_err(|e| errors.extend(e)).ok();
    let p = parse_problem_in(&problem.text, &problem.name).map_err(|e| errors.extend(e)).ok();
    let plan = match plan {
        Some(src) => parse_plan_in(&src.text, &src.name).map(|p| p.ast).map_err(|e| errors.extend(e)).ok(),
        None => Some(Plan::default()),
    };
    let (Some(d), Some(p), Some(plan)) = (d, p, plan) else {
        return Err(invalid_input(&errors));
    };
    let mut diagnostics = check_domain(&d.ast).diagnostics;
    diagnostics.extend(check_problem(&d.ast, &p.ast).diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(invalid_input(&diagnostics));
    }
    Ok(Task { domain: d.ast, problem: p.ast, plan })
}

/// Validates a plan. An invalid plan is a successful call whose report says
/// `INVALID`; only unusable inputs are errors.
pub fn validate_plan(domain: &Source, problem: &Source, plan: &Source) -> ToolOutput {
    let task = match load(domain, problem, Some(plan)) {
        Ok(t) => t,
        Err(out) => return out,
    };
    match run_validation(&task.domain, &task.problem, &task.plan) {
        Ok(report) => ToolOutput::ok(report.to_text(), &report),
        Err(ValidateError::InvalidInput(d)) => invalid_input(&d),
    }
}

/// The trace and the number of steps in the plan.
fn run(domain: &Source, problem: &Source, plan: &Source) -> Result<(Trace, usize), ToolOutput> {
    let task = load(domain, problem, Some(plan))?;
    Ok((simulate(&task.domain, &task.problem, &task.plan), task.plan.len()))
}

fn trace_summary(trace: &Trace, plan_len: usize) -> String {
    let mut text = String::new();
    match &trace.outcome {
        Outcome::Completed => {
            let _ = writeln!(
                text,
                "Executed all {plan_len} step(s); {} states (indices 0..={}).",
                trace.states.len(),
                trace.states.len() - 1
            );
        }
        Outcome::Failed { step, unsatisfied, error } => {
            let _ = writeln!(text, "Stopped at step {step} of {plan_len}: it cannot be applied.");
            if let Some(e) = error {
                let _ = writeln!(text, "  reason: {e}");
            }
            for u in unsatisfied {
                let _ = writeln!(text, "  unsatisfied precondition: {}", u.describe());
            }
        }
    }
    for a in &trace.applied {
        let _ = writeln!(text, "  {}: {}", a.step, a.action);
    }
    if trace.is_completed() {
        let _ = writeln!(text, "Goal satisfied: {}", if trace.goal_satisfied { "yes" } else { "no" });
    }
    if let Some(e) = &trace.evaluation_error {
        let _ = writeln!(text, "Evaluation error: {e}");
    }
    let _ = write!(text, "Final state:\n{}", trace.final_state());
    text
}

/// Simulates a plan and returns the full execution trace.
pub fn simulate_plan(domain: &Source, problem: &Source, plan: &Source) -> ToolOutput {
    match run(domain, problem, plan) {
        Ok((trace, steps)) => ToolOutput::ok(trace_summary(&trace, steps), &trace),
        Err(out) => out,
    }
}

/// State `index` of the trace (0 is the initial state).
pub fn get_state(domain: &Source, problem: &Source, plan: &Source, index: usize) -> ToolOutput {
    let trace = match run(domain, problem, plan) {
        Ok((t, _)) => t,
        Err(out) => return out,
    };
    match trace.state_at(index) {
        Ok(state) => ToolOutput::ok(state.to_string(), json!({"index": index, "state": state})),
        Err(e) => sim_error(&e),
    }
}

/// Ground action applied at step `index` (0-based).
pub fn get_action(domain: &Source, problem: &Source, plan: &Source, index: usize) -> ToolOutput {
    let trace = match run(domain, problem, plan) {
        Ok((t, _)) => t,
        Err(out) => return out,
    };
    match trace.action_at(index) {
        Ok(action) => {
            let action = action.to_string();
            ToolOutput::ok(format!("{action}\n"), json!({"index": index, "action": action}))
        }
        Err(e) => sim_error(&e),
    }
}

pub fn classify(domain: &Source, problem: &Source) -> ToolOutput {
    match load(domain, problem, None) {
        Ok(task) => {
            let kind = planner::classify(&task.domain, &task.problem);
            ToolOutput::ok(format!("{kind}\n"), json!({"kind": kind}))
        }
        Err(out) => out,
    }
}

/// Where planners are found and where their scratch directories go.
#[derive(Clone, Debug, Default)]
pub struct SolveContext {
    pub registry: Registry,
    pub workdir: Option<PathBuf>,
}

fn planner_error(e: &PlannerError) -> ToolOutput {
    if let PlannerError::InvalidInput(d) = e {
        return invalid_input(d);
    }
    let mut out = ToolOutput::error(e.code(), e.to_string(), &[]);
    // Adds raw_output_path and any output-parsing diagnostics.
    out.json = json!({"error": e});
    out
}

/// Runs a planner of `kind` (default: the classified kind) and validates
/// its plan.
pub fn solve(domain: &Source, problem: &Source, kind: Option<PlannerKind>, ctx: &SolveContext) -> ToolOutput {
    match planner::solve(&domain.text, &problem.text, kind, &ctx.registry, ctx.workdir.as_deref()) {
        Ok(res) => {
            let mut text = format!(
                "Planner '{}' ({}) returned a {}-step plan:\n{}",
                res.planner_name,
                res.kind,
                res.plan.len(),
                crate::pddl::print_plan(&res.plan)
            );
            text.push_str(&res.validated.to_text());
            let _ = writeln!(text, "Raw planner output: {}", res.raw_output_path.display());
            ToolOutput::ok(text, &res)
        }
        Err(e) => planner_error(&e),
    }
}

/// Like [`solve`] but refuses when the task classifies as the other kind.
pub fn solve_guarded(domain: &Source, problem: &Source, kind: PlannerKind, ctx: &SolveContext) -> ToolOutput {
    let task = match load(domain, problem, None) {
        Ok(t) => t,
        Err(out) => return out,
    };
    let actual = planner::classify(&task.domain, &task.problem);
    if actual != kind {
        let tool = match actual {
            PlannerKind::Classical => "solve_classical",
            PlannerKind::Numeric => "solve_numeric",
        };
        let mut out = ToolOutput::error(
            "planner-kind-mismatch",
            format!("this task is {actual}, not {kind}; call {tool} instead"),
            &[],
        );
        out.json["error"]["recommended_tool"] = json!(tool);
        return out;
    }
    solve(domain, problem, Some(kind), ctx)
}

/// Writes the plan in canonical form to `path`.
pub fn save_plan(plan: &Source, path: &Path) -> ToolOutput {
    let parsed = match parse_plan_in(&plan.text, &plan.name) {
        Ok(p) => p.ast,
        Err(d) => return invalid_input(&d),
    };
    match persist_plan(&parsed, path) {
        Ok(written) => ToolOutput::ok(
            format!("Saved {}-step plan to {}\n", parsed.len(), written.display()),
            json!({"path": written, "steps": parsed.len()}),
        ),
        Err(e) => ToolOutput::error("io-error", e.to_string(), &[]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(text: &str, name: &str) -> Source {
        Source::new(text, name)
    }

    const DOMAIN: &str = "(define (domain d) (:predicates (p ?x) (q ?x))
        (:action go :parameters (?x) :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))";
    const PROBLEM: &str = "(define (problem t) (:domain d) (:objects a) (:init (p a)) (:goal (q a)))";

    #[test]
    fn validate_plan_reports_valid() {
        let out = validate_plan(&src(DOMAIN, "d"), &src(PROBLEM, "p"), &src("(go a)", "plan"));
        assert!(!out.is_error);
        assert!(out.text.starts_with("VALID"));
        assert_eq!(out.json["valid"], true);
    }

    #[test]
    fn parse_errors_from_all_inputs_are_collected() {
        let out = validate_plan(&src("(define (domain d)", "d"), &src(PROBLEM, "p"), &src("(go a", "plan"));
        assert!(out.is_error);
        let diags = out.json["error"]["diagnostics"].as_array().unwrap();
        let files: Vec<_> = diags.iter().map(|d| d["file"].as_str().unwrap()).collect();
        assert!(files.contains(&"d") && files.contains(&"plan"), "{files:?}");
    }

    #[test]
    fn get_state_and_action_indexing() {
        let (d, p, plan) = (src(DOMAIN, "d"), src(PROBLEM, "p"), src("(go a)", "plan"));
        assert_eq!(get_state(&d, &p, &plan, 0).text, "(p a)\n");
        assert_eq!(get_state(&d, &p, &plan, 1).text, "(q a)\n");
        let out = get_state(&d, &p, &plan, 2);
        assert!(out.is_error);
        assert_eq!(out.json["error"]["code"], "index-out-of-range");
        assert_eq!(get_action(&d, &p, &plan, 0).json["action"], "(go a)");
        assert!(get_action(&d, &p, &plan, 1).is_error);
    }

    #[test]
    fn check_failure_is_an_error_output() {
        let out = validate_domain(&src("(define (domain d) (:action a :parameters () :effect (r)))", "d"));
        assert!(out.is_error);
        assert_eq!(out.json["ok"], false);
        assert!(out.text.starts_with("FAILED"));
    }

    #[test]
    fn guard_recommends_the_other_tool() {
        let out = solve_guarded(&src(DOMAIN, "d"), &src(PROBLEM, "p"), PlannerKind::Numeric, &SolveContext::default());
        assert!(out.is_error);
        assert_eq!(out.json["error"]["recommended_tool"], "solve_classical");
        assert!(out.text.contains("solve_classical"));
    }

    #[test]
    fn unconfigured_solver_is_an_error() {
        let out = solve(&src(DOMAIN, "d"), &src(PROBLEM, "p"), None, &SolveContext::default());
        assert!(out.is_error);
        assert_eq!(out.json["error"]["code"], "planner-not-configured");
    }
}

use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use super::config::OutputParser;
use crate::diagnostic::{Code, Diagnostic, SourceSpan};
use crate::pddl::{parse_plan_in, Plan, PlanStep};

/// The planner produced nothing that reads as a plan.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no plan found: {message}")]
pub struct NoPlanFound {
    pub message: String,
    pub diagnostics: Vec<Diagnostic>,
}

fn metricff_step() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(?:(?i:step)\s+)?(\d+):\s+(.+?)\s*$").expect("valid regex"))
}

/// Metric-FF announces solved tasks with these phrases even when the plan
/// has no steps.
const METRICFF_SOLVED: &[&str] = &["found legal plan", "the empty plan solves it"];

/// Turns captured planner output into a plan.
///
/// `plan-file` and `stdout-lines` read the text as a plan file. Empty or
/// whitespace-only output is always `NoPlanFound`.
pub fn parse_planner_output(bytes: &[u8], parser: OutputParser, source: &str) -> Result<Plan, NoPlanFound> {
    let text = String::from_utf8_lossy(bytes);
    if text.trim().is_empty() {
        return Err(NoPlanFound { message: format!("{source} is empty"), diagnostics: Vec::new() });
    }
    match parser {
        OutputParser::PlanFile | OutputParser::StdoutLines => match parse_plan_in(&text, source) {
            Ok(parsed) => Ok(parsed.ast),
            Err(diagnostics) => Err(NoPlanFound {
                message: diagnostics.first().map(|d| d.message.clone()).unwrap_or_default(),
                diagnostics,
            }),
        },
        OutputParser::StdoutMetricff => parse_metricff(&text, source),
    }
}

fn parse_metricff(text: &str, source: &str) -> Result<Plan, NoPlanFound> {
    let mut steps = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let Some(caps) = metricff_step().captures(line) else {
            continue;
        };
        let body = caps[2].to_lowercase();
        let body = body.trim().trim_start_matches('(').trim_end_matches(')');
        let mut words = body.split_whitespace().map(str::to_string);
        let Some(name) = words.next() else {
            continue;
        };
        let line_no = idx as u32 + 1;
        let width = line.chars().count().max(1) as u32;
        steps.push(PlanStep {
            name,
            args: words.collect(),
            span: SourceSpan::new(source.into(), (line_no, 1), (line_no, width)),
        });
    }
    let lower = text.to_lowercase();
    if steps.is_empty() && !METRICFF_SOLVED.iter().any(|m| lower.contains(m)) {
        let (line_no, first) = text.lines().enumerate().find(|(_, l)| !l.trim().is_empty()).expect("text is not blank");
        let line_no = line_no as u32 + 1;
        let message = format!("no 'step N: ACTION ARGS' lines; first rejected line {line_no}: {:?}", first.trim());
        let span = SourceSpan::new(source.into(), (line_no, 1), (line_no, first.chars().count().max(1) as u32));
        return Err(NoPlanFound {
            diagnostics: vec![Diagnostic::error(Code::MalformedPlanStep, span, message.clone())],
            message,
        });
    }
    Ok(Plan { steps })
}

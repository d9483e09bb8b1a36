use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::planner::PlannerKind;
use crate::tools::{self, SolveContext, Source, ToolOutput};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToolDescriptor {
    pub name: &'static str,
    pub description: String,
    #[serde(rename = "inputSchema")]
    pub input_schema: Value,
}

const INPUT_NOTE: &str = "Each PDDL input is given either inline (`<name>_text`) or as a file path \
(`<name>_path`), never both.";

const INDEX_NOTE: &str = "Indexing is 0-based: state 0 is the initial state, state i+1 is the state \
after action i, and action 0 is the first plan step.";

const PLAN_NOTE: &str = "Plans have one step per line, e.g. `(move a b)`; `;` starts a comment and \
`t:` prefixes or `[d]` suffixes are ignored.";

/// Ordered list of the inputs a tool reads, each with a text and path form.
fn inputs(names: &[&str]) -> (Map<String, Value>, Vec<Value>) {
    let mut properties = Map::new();
    let mut choices = Vec::new();
    for name in names {
        let what = match *name {
            "domain" => "PDDL domain",
            "problem" => "PDDL problem",
            _ => "plan",
        };
        properties
            .insert(format!("{name}_text"), json!({"type": "string", "description": format!("The {what} as text.")}));
        properties.insert(
            format!("{name}_path"),
            json!({"type": "string", "description": format!("Path to a file holding the {what}.")}),
        );
        choices.push(json!({"oneOf": [
            {"required": [format!("{name}_text")]},
            {"required": [format!("{name}_path")]},
        ]}));
    }
    (properties, choices)
}

fn schema(names: &[&str], extra: &[(&str, Value)]) -> Value {
    let (mut properties, choices) = inputs(names);
    let mut required = Vec::new();
    for (name, prop) in extra {
        properties.insert(name.to_string(), prop.clone());
        required.push(*name);
    }
    let mut schema = json!({
        "type": "object",
        "properties": properties,
        "required": required,
        "additionalProperties": false,
    });
    if !choices.is_empty() {
        schema["allOf"] = Value::Array(choices);
    }
    schema
}

fn index_property(what: &str) -> Value {
    json!({"type": "integer", "minimum": 0, "description": format!("0-based {what} index.")})
}

pub fn descriptors() -> Vec<ToolDescriptor> {
    let dp = &["domain", "problem"][..];
    let dpp = &["domain", "problem", "plan"][..];
    let tool = |name, description: String, input_schema| ToolDescriptor { name, description, input_schema };
    vec![
        tool(
            "validate_domain",
            format!(
                "Check a PDDL domain for syntax errors and internal consistency (declared types, predicates, \
                 functions, arities, variables, requirements). Returns a summary line starting with OK or FAILED, \
                 then a JSON CheckReport {{ok, diagnostics}}. {INPUT_NOTE}"
            ),
            schema(&["domain"], &[]),
        ),
        tool(
            "validate_problem",
            format!(
                "Check that a PDDL problem is well formed and consistent with its domain (objects, init, goal, \
                 metric). Returns OK or FAILED and a JSON CheckReport {{ok, diagnostics}}. {INPUT_NOTE}"
            ),
            schema(dp, &[]),
        ),
        tool(
            "validate_plan",
            format!(
                "Check whether a plan is executable from the initial state and achieves the goal. The first line \
                 is VALID or INVALID with the failing step, the unsatisfied conditions and suggestions naming \
                 action schemas that could help. The JSON is the ValidationReport including the trace. \
                 {INDEX_NOTE} {PLAN_NOTE} {INPUT_NOTE}"
            ),
            schema(dpp, &[]),
        ),
        tool(
            "simulate_plan",
            format!(
                "Execute a plan step by step, stopping at the first inapplicable step. Returns a summary and the \
                 JSON trace {{states, applied, outcome, goal_satisfied, metric_value}}. {INDEX_NOTE} {PLAN_NOTE} \
                 {INPUT_NOTE}"
            ),
            schema(dpp, &[]),
        ),
        tool(
            "get_state",
            format!(
                "Return the state at `index` of the plan's execution as sorted ground atoms followed by \
                 `(= fluent value)` lines. Use index 5 for the 5th state after the initial one. {INDEX_NOTE} \
                 {INPUT_NOTE}"
            ),
            schema(dpp, &[("index", index_property("state"))]),
        ),
        tool(
            "get_action",
            format!(
                "Return the ground action applied at step `index` of the plan, e.g. `(move a b)`. {INDEX_NOTE} \
                 {INPUT_NOTE}"
            ),
            schema(dpp, &[("index", index_property("action"))]),
        ),
        tool(
            "solve_classical",
            format!(
                "Solve a classical planning task (no numeric fluents except an action-costs total-cost) with the \
                 configured classical planner. The returned plan is validated before it is returned. Refuses \
                 numeric tasks and recommends solve_numeric. If no plan is found, treat the task as unsolvable. \
                 {INPUT_NOTE}"
            ),
            schema(dp, &[]),
        ),
        tool(
            "solve_numeric",
            format!(
                "Solve a numeric planning task (numeric fluents, comparisons or numeric effects) with the \
                 configured numeric planner. The returned plan is validated before it is returned. Refuses \
                 classical tasks and recommends solve_classical. If no plan is found, treat the task as \
                 unsolvable. {INPUT_NOTE}"
            ),
            schema(dp, &[]),
        ),
        tool(
            "save_plan",
            format!(
                "Save a plan to `path` in canonical form (one `(action args)` per line), overwriting any existing \
                 file, so it can be passed to other tools via plan_path. Returns the absolute path. {PLAN_NOTE}"
            ),
            schema(&["plan"], &[("path", json!({"type": "string", "description": "Destination file path."}))]),
        ),
    ]
}

/// Arguments that do not fit the tool's schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidParams(pub String);

/// Resolves `<name>_text` or `<name>_path`. A path that cannot be read is
/// a tool-level failure, not an argument error.
fn source(args: &Map<String, Value>, name: &str) -> Result<Result<Source, ToolOutput>, InvalidParams> {
    let text_key = format!("{name}_text");
    let path_key = format!("{name}_path");
    let get = |key: &str| match args.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(InvalidParams(format!("'{key}' must be a string"))),
    };
    match (get(&text_key)?, get(&path_key)?) {
        (Some(text), None) => Ok(Ok(Source::new(text, default_name(name)))),
        (None, Some(path)) => Ok(Source::read(Path::new(&path))
            .map_err(|e| ToolOutput::error("io-error", format!("cannot read {name} file {path}: {e}"), &[]))),
        (Some(_), Some(_)) => Err(InvalidParams(format!("give either '{text_key}' or '{path_key}', not both"))),
        (None, None) => Err(InvalidParams(format!("missing '{text_key}' or '{path_key}'"))),
    }
}

fn default_name(name: &str) -> &'static str {
    match name {
        "domain" => "domain.pddl",
        "problem" => "problem.pddl",
        _ => "plan.txt",
    }
}

fn index(args: &Map<String, Value>) -> Result<usize, InvalidParams> {
    match args.get("index") {
        Some(v) => v
            .as_u64()
            .and_then(|i| usize::try_from(i).ok())
            .ok_or_else(|| InvalidParams("'index' must be a non-negative integer".into())),
        None => Err(InvalidParams("missing 'index'".into())),
    }
}

/// Runs tool `name`. `Err` means the tool is unknown or the arguments do
/// not match its schema.
pub fn call(name: &str, arguments: Option<&Value>, ctx: &SolveContext) -> Result<ToolOutput, InvalidParams> {
    let descriptor = descriptors()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| InvalidParams(format!("unknown tool '{name}'")))?;
    let empty = Map::new();
    let args = match arguments {
        None | Some(Value::Null) => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => return Err(InvalidParams("'arguments' must be an object".into())),
    };
    let allowed = &descriptor.input_schema["properties"];
    if let Some(key) = args.keys().find(|k| allowed.get(k.as_str()).is_none()) {
        return Err(InvalidParams(format!("unexpected argument '{key}' for {name}")));
    }

    macro_rules! load {
        ($input:expr) => {
            match source(args, $input)? {
                Ok(s) => s,
                Err(out) => return Ok(out),
            }
        };
    }

    Ok(match name {
        "validate_domain" => tools::validate_domain(&load!("domain")),
        "validate_problem" => {
            let (d, p) = (source(args, "domain")?, source(args, "problem")?);
            match (d, p) {
                (Ok(d), Ok(p)) => tools::validate_problem(&d, &p),
                (Err(out), _) | (_, Err(out)) => out,
            }
        }
        "save_plan" => {
            let path = match args.get("path") {
                Some(Value::String(p)) => p.clone(),
                Some(_) => return Err(InvalidParams("'path' must be a string".into())),
                None => return Err(InvalidParams("missing 'path'".into())),
            };
            tools::save_plan(&load!("plan"), Path::new(&path))
        }
        "solve_classical" | "solve_numeric" => {
            let (d, p) = (source(args, "domain")?, source(args, "problem")?);
            let kind = if name == "solve_classical" { PlannerKind::Classical } else { PlannerKind::Numeric };
            match (d, p) {
                (Ok(d), Ok(p)) => tools::solve_guarded(&d, &p, kind, ctx),
                (Err(out), _) | (_, Err(out)) => out,
            }
        }
        _ => {
            let at = if matches!(name, "get_state" | "get_action") { Some(index(args)?) } else { None };
            let (d, p, plan) = (source(args, "domain")?, source(args, "problem")?, source(args, "plan")?);
            let (d, p, plan) = match (d, p, plan) {
                (Ok(d), Ok(p), Ok(plan)) => (d, p, plan),
                (Err(out), _, _) | (_, Err(out), _) | (_, _, Err(out)) => return Ok(out),
            };
            match (name, at) {
                ("validate_plan", _) => tools::validate_plan(&d, &p, &plan),
                ("simulate_plan", _) => tools::simulate_plan(&d, &p, &plan),
                ("get_state", Some(i)) => tools::get_state(&d, &p, &plan, i),
                ("get_action", Some(i)) => tools::get_action(&d, &p, &plan, i),
                _ => unreachable!("every descriptor has a dispatch arm"),
            }
        }
    })
}

//! Corpus runner. A corpus directory holds one subdirectory per domain
//! family containing `domain.pddl`, any number of problem files `*.pddl`,
//! and optionally a plan `<problem>.plan` per problem.

use std::fmt::Write;
use std::fs;
use std::io;
use std::path::Path;

use pddl_copilot::check::{check_domain, check_problem};
use pddl_copilot::pddl::{parse_domain_in, parse_plan_in, parse_problem_in, print_domain, print_problem, ParseResult};
use pddl_copilot::planner::classify;
use pddl_copilot::validate::validate_plan;
use serde_json::{json, Value};

pub struct Report {
    pub ok: bool,
    lines: Vec<String>,
    families: Vec<Value>,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let _ = writeln!(out, "{l}");
        }
        let _ = writeln!(out, "{}", if self.ok { "corpus OK" } else { "corpus FAILED" });
        out
    }

    pub fn to_json(&self) -> Value {
        json!({"ok": self.ok, "families": self.families})
    }
}

/// Parses, prints and re-parses; the error names the first step that failed.
fn round_trip<T: PartialEq>(
    text: &str,
    name: &str,
    parse: fn(&str, &str) -> ParseResult<T>,
    print: fn(&T) -> String,
) -> Result<T, String> {
    let ast = parse(text, name).map_err(|d| format!("parse failed: {}", d[0]))?.ast;
    let again = parse(&print(&ast), name).map_err(|d| format!("re-parse failed: {}", d[0]))?.ast;
    if again != ast {
        return Err("printed form parses to a different AST".into());
    }
    Ok(ast)
}

pub fn run(dir: &Path) -> io::Result<Report> {
    let mut families: Vec<_> = fs::read_dir(dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join("domain.pddl").is_file())
        .collect();
    families.sort();
    let mut report = Report { ok: true, lines: Vec::new(), families: Vec::new() };
    for family in families {
        let fname = family.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let domain_path = family.join("domain.pddl");
        let text = fs::read_to_string(&domain_path)?;
        let domain = match round_trip(&text, &domain_path.display().to_string(), parse_domain_in, print_domain) {
            Ok(d) => d,
            Err(e) => {
                report.ok = false;
                report.lines.push(format!("{fname}: domain {e}"));
                report.families.push(json!({"name": fname, "error": e}));
                continue;
            }
        };
        let domain_ok = check_domain(&domain).ok;
        report.ok &= domain_ok;

        let mut problems: Vec<_> = fs::read_dir(&family)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "pddl") && p.file_name() != Some("domain.pddl".as_ref()))
            .collect();
        problems.sort();
        let mut entries = Vec::new();
        for path in problems {
            let pname = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let text = fs::read_to_string(&path)?;
            let mut entry = json!({"name": pname});
            let problem = match round_trip(&text, &path.display().to_string(), parse_problem_in, print_problem) {
                Ok(p) => p,
                Err(e) => {
                    report.ok = false;
                    report.lines.push(format!("{fname}/{pname}: problem {e}"));
                    entry["error"] = json!(e);
                    entries.push(entry);
                    continue;
                }
            };
            let check_ok = check_problem(&domain, &problem).ok;
            let kind = classify(&domain, &problem);
            let mut line =
                format!("{fname}/{pname}: {kind}, round-trip ok, check {}", if check_ok { "ok" } else { "FAILED" });
            entry["kind"] = json!(kind);
            entry["check_ok"] = json!(check_ok);
            report.ok &= check_ok;

            let plan_path = path.with_extension("plan");
            if plan_path.is_file() {
                let text = fs::read_to_string(&plan_path)?;
                let valid = parse_plan_in(&text, &plan_path.display().to_string())
                    .ok()
                    .and_then(|plan| validate_plan(&domain, &problem, &plan.ast).ok())
                    .map(|r| r.valid)
                    .unwrap_or(false);
                let _ = write!(line, ", plan {}", if valid { "VALID" } else { "INVALID" });
                entry["plan_valid"] = json!(valid);
                report.ok &= valid;
            }
            report.lines.push(line);
            entries.push(entry);
        }
        report.families.push(json!({"name": fname, "domain_check_ok": domain_ok, "problems": entries}));
    }
    Ok(report)
}

//! Line-oriented plan files.
//!
//! Accepted step shapes, one per line:
//!
//! ```text
//! (move a b)
//! 0: (move a b)
//! 0.001: (move a b) [1]
//! ```
//!
//! Text after `;` is a comment. Time prefixes and bracketed durations are
//! ignored.

use std::sync::Arc;

use super::ast::{Plan, PlanStep};
use super::parser::{ParseResult, Parsed};
use crate::diagnostic::{Code, Diagnostic, SourceSpan};
use crate::number::parse_decimal;

pub fn parse_plan(text: &str) -> ParseResult<Plan> {
    parse_plan_in(text, "<plan>")
}

pub fn parse_plan_in(text: &str, file: &str) -> ParseResult<Plan> {
    let file: Arc<str> = Arc::from(file);
    let mut steps = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let content = raw.split(';').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        match parse_step(content) {
            Ok((name, args, start, end)) => steps.push(PlanStep {
                name,
                args,
                span: SourceSpan::new(file.clone(), (line_no, start), (line_no, end)),
            }),
            Err(reason) => {
                let width = content.trim_end().chars().count().max(1) as u32;
                diagnostics.push(Diagnostic::error(
                    Code::MalformedPlanStep,
                    SourceSpan::new(file.clone(), (line_no, 1), (line_no, width)),
                    format!("line {line_no}: {reason}: {:?}", raw.trim()),
                ));
            }
        }
    }
    if diagnostics.is_empty() {
        Ok(Parsed { ast: Plan { steps }, warnings: Vec::new() })
    } else {
        Err(diagnostics)
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| {
            c.is_alphanumeric() || matches!(c, '-' | '_' | '.' | '@' | '#' | '$' | '%' | '&' | '~' | '^' | '\'')
        })
}

/// Returns (name, args, start column, end column) for one step line.
fn parse_step(line: &str) -> Result<(String, Vec<String>, u32, u32), &'static str> {
    let mut rest = line.trim_start();
    if let Some((prefix, after)) = rest.split_once(':') {
        if !prefix.contains('(') {
            if parse_decimal(prefix.trim()).is_none() {
                return Err("expected a numeric time prefix before ':'");
            }
            rest = after.trim_start();
        }
    }
    let Some(body) = rest.strip_prefix('(') else {
        return Err("expected '(' to start a step");
    };
    let Some(close) = body.find(')') else {
        return Err("unbalanced parenthesis");
    };
    let inner = &body[..close];
    if inner.contains('(') {
        return Err("nested parenthesis in step");
    }
    let trailer = body[close + 1..].trim();
    if !trailer.is_empty() {
        let ok = trailer
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .is_some_and(|d| parse_decimal(d.trim()).is_some());
        if !ok {
            return Err("unexpected text after step");
        }
    }
    let mut words = inner.split_whitespace().map(str::to_lowercase);
    let Some(name) = words.next() else {
        return Err("empty step");
    };
    let args: Vec<String> = words.collect();
    if !valid_name(&name) || !args.iter().all(|a| valid_name(a)) {
        return Err("illegal character in step");
    }
    let start = (line.len() - rest.len()) as u32 + 1;
    let end = start + close as u32 + 1;
    Ok((name, args, start, end))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steps(text: &str) -> Vec<(String, Vec<String>)> {
        parse_plan(text).unwrap().ast.steps.into_iter().map(|s| (s.name, s.args)).collect()
    }

    #[test]
    fn empty_plan() {
        assert!(steps("").is_empty());
        assert!(steps("; only a comment\n\n").is_empty());
    }

    #[test]
    fn ipc_prefix_and_duration() {
        assert_eq!(steps("0: (move a b) [1]"), vec![("move".into(), vec!["a".into(), "b".into()])]);
        assert_eq!(steps("0.001:   (MOVE A B)   [1.5]  ; c"), steps("(move a b)"));
    }

    #[test]
    fn sas_plan_shape() {
        assert_eq!(steps("(move a b)\n; cost = 1 (unit cost)\n").len(), 1);
    }

    #[test]
    fn unbalanced_line() {
        let diags = parse_plan("(move a").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::MalformedPlanStep);
        assert_eq!(diags[0].span.start_line, 1);
        assert!(diags[0].message.contains("line 1"));
    }

    #[test]
    fn every_bad_line_is_reported() {
        let diags = parse_plan("(a)\nfoo\n(b)\n(c) extra\nx: (d)").unwrap_err();
        let lines: Vec<u32> = diags.iter().map(|d| d.span.start_line).collect();
        assert_eq!(lines, vec![2, 4, 5]);
    }

    #[test]
    fn zero_arity_step() {
        assert_eq!(steps("(noop)"), vec![("noop".into(), vec![])]);
    }
}

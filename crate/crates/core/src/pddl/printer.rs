//! Canonical PDDL output: lower-case, two-space indentation, one section per
//! line group. Printing and re-parsing yields a structurally equal tree.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::ast::*;
use crate::number::format_rational;

const INDENT: &str = "  ";

/// `a b - t c - u`, merging runs of equal type. The `- object` suffix is
/// only dropped when every name is untyped.
fn typed_names(names: &[TypedName]) -> String {
    let all_object = names.iter().all(|n| n.ty == OBJECT_TYPE);
    let mut out = String::new();
    let mut i = 0;
    while i < names.len() {
        let ty = &names[i].ty;
        let mut j = i;
        while j < names.len() && names[j].ty == *ty {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&names[j].name);
            j += 1;
        }
        if !all_object {
            let _ = write!(out, " - {ty}");
        }
        i = j;
    }
    out
}

fn params(names: &[TypedName]) -> String {
    let vars: Vec<TypedName> = names.iter().map(|n| TypedName { name: format!("?{}", n.name), ..n.clone() }).collect();
    typed_names(&vars)
}

fn declaration(d: &PredicateDecl) -> String {
    let p = params(&d.params);
    if p.is_empty() {
        format!("({})", d.name)
    } else {
        format!("({} {p})", d.name)
    }
}

fn requirements(out: &mut String, reqs: &std::collections::BTreeSet<Requirement>) {
    if reqs.is_empty() {
        return;
    }
    let _ = write!(out, "\n{INDENT}(:requirements");
    for r in reqs {
        let _ = write!(out, " :{}", r.keyword());
    }
    out.push(')');
}

fn block(out: &mut String, keyword: &str, lines: impl IntoIterator<Item = String>) {
    let _ = write!(out, "\n{INDENT}(:{keyword}");
    for line in lines {
        let _ = write!(out, "\n{INDENT}{INDENT}{line}");
    }
    out.push(')');
}

pub fn print_domain(domain: &Domain) -> String {
    let mut out = format!("(define (domain {})", domain.name);
    requirements(&mut out, &domain.requirements);
    if !domain.types.is_empty() {
        let mut by_parent: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (name, parent) in domain.types.iter() {
            by_parent.entry(parent).or_default().push(name);
        }
        block(
            &mut out,
            "types",
            by_parent.into_iter().map(|(parent, children)| format!("{} - {parent}", children.join(" "))),
        );
    }
    if !domain.constants.is_empty() {
        block(&mut out, "constants", [typed_names(&domain.constants)]);
    }
    if !domain.predicates.is_empty() {
        block(&mut out, "predicates", domain.predicates.iter().map(declaration));
    }
    if !domain.functions.is_empty() {
        block(&mut out, "functions", domain.functions.iter().map(|f| format!("{} - number", declaration(f))));
    }
    for action in &domain.actions {
        let _ = write!(out, "\n{INDENT}(:action {}", action.name);
        let _ = write!(out, "\n{INDENT}{INDENT}:parameters ({})", params(&action.params));
        let _ = write!(out, "\n{INDENT}{INDENT}:precondition {}", action.precondition);
        let _ = write!(out, "\n{INDENT}{INDENT}:effect {})", action.effect);
    }
    out.push_str("\n)\n");
    out
}

pub fn print_problem(problem: &Problem) -> String {
    let mut out = format!("(define (problem {})", problem.name);
    let _ = write!(out, "\n{INDENT}(:domain {})", problem.domain_name);
    requirements(&mut out, &problem.requirements);
    if !problem.objects.is_empty() {
        block(&mut out, "objects", [typed_names(&problem.objects)]);
    }
    let init = problem
        .init
        .atoms
        .iter()
        .map(ToString::to_string)
        .chain(problem.init.fluents.iter().map(|(f, v)| format!("(= {f} {})", format_rational(v))));
    block(&mut out, "init", init);
    let _ = write!(out, "\n{INDENT}(:goal {})", problem.goal);
    if let Some(metric) = &problem.metric {
        let _ = write!(out, "\n{INDENT}(:metric {} {})", metric.direction.keyword(), metric.expr);
    }
    out.push_str("\n)\n");
    out
}

pub fn print_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for step in &plan.steps {
        let _ = writeln!(out, "{step}");
    }
    out
}

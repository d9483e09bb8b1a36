//! Static consistency checks for domains and for problems against their
//! domain.
//!
//! "Consistent" means well-formed: every name resolves, arities and types
//! agree, and required features are declared. It does not mean solvable.
//!
//! Domain checks: cyclic types, undeclared types, duplicate
//! action/predicate/function/constant names, undeclared predicates and
//! functions, arity mismatches, argument types incompatible with the
//! declaration, unbound variables, and (as warnings) numeric, negative,
//! equality or typing constructs used without the matching requirement.
//!
//! Problem checks: domain name mismatch (warning), undeclared object types,
//! duplicate objects, objects shadowing domain constants (warning), init
//! facts and fluent assignments that do not match the domain, goal or
//! metric references to undeclared predicates, functions or objects, and
//! fluents read by the goal or metric that are never initialized (warning).

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::diagnostic::{has_errors, Code, Diagnostic, SourceSpan};
use crate::pddl::*;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn from_diagnostics(diagnostics: Vec<Diagnostic>) -> Self {
        CheckReport { ok: !has_errors(&diagnostics), diagnostics }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

/// Object name → declared type, for domain constants merged with problem
/// objects (problem declarations win).
pub fn object_table(domain: &Domain, problem: Option<&Problem>) -> BTreeMap<String, String> {
    let mut table = BTreeMap::new();
    for c in &domain.constants {
        table.entry(c.name.clone()).or_insert_with(|| c.ty.clone());
    }
    if let Some(p) = problem {
        let mut seen = HashSet::new();
        for o in &p.objects {
            if seen.insert(o.name.as_str()) {
                table.insert(o.name.clone(), o.ty.clone());
            }
        }
    }
    table
}

struct Checker<'a> {
    domain: &'a Domain,
    objects: BTreeMap<String, String>,
    out: Vec<Diagnostic>,
}

enum Kind {
    Predicate,
    Function,
}

impl<'a> Checker<'a> {
    fn error(&mut self, code: Code, span: &SourceSpan, msg: String) {
        self.out.push(Diagnostic::error(code, span.clone(), msg));
    }

    fn warning(&mut self, code: Code, span: &SourceSpan, msg: String) {
        self.out.push(Diagnostic::warning(code, span.clone(), msg));
    }

    fn check_type(&mut self, ty: &str, span: &SourceSpan) {
        if !self.domain.types.is_declared(ty) {
            self.error(Code::UndeclaredType, span, format!("type '{ty}' is not declared"));
        }
    }

    fn check_typed(&mut self, names: &[TypedName]) {
        for n in names {
            self.check_type(&n.ty, &n.span);
        }
    }

    fn duplicates<'n>(&mut self, names: impl Iterator<Item = (&'n str, &'n SourceSpan)>, code: Code, what: &str) {
        let mut seen: HashMap<&str, &SourceSpan> = HashMap::new();
        for (name, span) in names {
            if let Some(first) = seen.get(name) {
                self.out.push(
                    Diagnostic::error(code, span.clone(), format!("{what} '{name}' is declared more than once"))
                        .with_related((*first).clone()),
                );
            } else {
                seen.insert(name, span);
            }
        }
    }

    /// Checks a predicate or function application: the name resolves, the
    /// arity matches and each argument is bound and type-compatible.
    fn application(&mut self, kind: Kind, name: &str, terms: &[Term], span: &SourceSpan, scope: &HashMap<&str, &str>) {
        let (decl, code, what) = match kind {
            Kind::Predicate => (self.domain.predicate(name), Code::UndeclaredPredicate, "predicate"),
            Kind::Function => (self.domain.function(name), Code::UndeclaredFunction, "function"),
        };
        let Some(decl) = decl else {
            self.error(code, span, format!("{what} '{name}' is not declared"));
            for t in terms {
                self.term_type(t, span, scope);
            }
            return;
        };
        if decl.params.len() != terms.len() {
            self.out.push(
                Diagnostic::error(
                    Code::ArityMismatch,
                    span.clone(),
                    format!("{what} '{name}' takes {} argument(s) but {} were given", decl.params.len(), terms.len()),
                )
                .with_related(decl.span.clone()),
            );
            for t in terms {
                self.term_type(t, span, scope);
            }
            return;
        }
        let expected: Vec<String> = decl.params.iter().map(|p| p.ty.clone()).collect();
        for (term, want) in terms.iter().zip(&expected) {
            if let Some(actual) = self.term_type(term, span, scope) {
                if self.domain.types.is_declared(want) && !self.domain.types.is_subtype(&actual, want) {
                    self.error(
                        Code::TypeMismatch,
                        span,
                        format!("argument {term} of type '{actual}' is incompatible with '{want}' in {what} '{name}'"),
                    );
                }
            }
        }
    }

    /// Resolves the type of a term, reporting unbound variables and unknown
    /// objects.
    fn term_type(&mut self, term: &Term, span: &SourceSpan, scope: &HashMap<&str, &str>) -> Option<String> {
        match term {
            Term::Var(v) => match scope.get(v.as_str()) {
                Some(t) => Some((*t).to_string()),
                None => {
                    self.error(Code::UnboundVariable, span, format!("variable ?{v} is not bound by the parameters"));
                    None
                }
            },
            Term::Object(o) => match self.objects.get(o) {
                Some(t) => Some(t.clone()),
                None => {
                    self.error(Code::UndeclaredObject, span, format!("object '{o}' is not declared"));
                    None
                }
            },
        }
    }

    fn numeric(&mut self, expr: &NumericExpr, scope: &HashMap<&str, &str>) {
        for f in expr.fluents() {
            self.application(Kind::Function, &f.function, &f.terms, &f.span, scope);
        }
    }

    fn condition(&mut self, cond: &Condition, scope: &HashMap<&str, &str>) {
        match cond {
            Condition::Atom(a) => self.application(Kind::Predicate, &a.predicate, &a.terms, &a.span, scope),
            Condition::Equality { lhs, rhs, span } => {
                self.term_type(lhs, span, scope);
                self.term_type(rhs, span, scope);
            }
            Condition::Comparison { lhs, rhs, .. } => {
                self.numeric(lhs, scope);
                self.numeric(rhs, scope);
            }
            Condition::Not(inner) => self.condition(inner, scope),
            Condition::And(parts) => parts.iter().for_each(|p| self.condition(p, scope)),
        }
    }

    fn effect(&mut self, effect: &Effect, scope: &HashMap<&str, &str>) {
        for e in &effect.effects {
            match e {
                AtomicEffect::Add(a) | AtomicEffect::Delete(a) => {
                    self.application(Kind::Predicate, &a.predicate, &a.terms, &a.span, scope)
                }
                AtomicEffect::Update { target, value, .. } => {
                    self.application(Kind::Function, &target.function, &target.terms, &target.span, scope);
                    self.numeric(value, scope);
                }
            }
        }
    }
}

/// True when the only numeric construct in the domain is `total-cost`
/// increased by action effects.
pub(crate) fn is_cost_only_update(op: UpdateOp, target: &FluentRef) -> bool {
    op == UpdateOp::Increase && target.function == TOTAL_COST && target.terms.is_empty()
}

pub fn check_domain(domain: &Domain) -> CheckReport {
    let mut c = Checker { domain, objects: object_table(domain, None), out: Vec::new() };

    for ty in domain.types.cyclic_types() {
        let span = domain.types.span(ty).cloned().unwrap_or_else(|| domain.span.clone());
        c.error(Code::CyclicType, &span, format!("type '{ty}' is part of an inheritance cycle"));
    }
    if !domain.types.is_empty() && !domain.has_requirement(Requirement::Typing) {
        c.warning(Code::MissingRequirement, &domain.span, "types are declared but :typing is not required".to_string());
    }

    c.check_typed(&domain.constants);
    c.duplicates(domain.constants.iter().map(|n| (n.name.as_str(), &n.span)), Code::DuplicateObject, "constant");
    c.duplicates(domain.predicates.iter().map(|p| (p.name.as_str(), &p.span)), Code::DuplicatePredicate, "predicate");
    c.duplicates(domain.functions.iter().map(|p| (p.name.as_str(), &p.span)), Code::DuplicateFunction, "function");
    c.duplicates(domain.actions.iter().map(|a| (a.name.as_str(), &a.span)), Code::DuplicateAction, "action");
    for decl in domain.predicates.iter().chain(&domain.functions) {
        c.check_typed(&decl.params);
    }

    let numeric_req =
        domain.has_requirement(Requirement::Fluents) || domain.has_requirement(Requirement::NumericFluents);
    let cost_req = domain.has_requirement(Requirement::ActionCosts);
    let mut numeric_uses: Vec<SourceSpan> = Vec::new();
    let mut negation_uses = Vec::new();
    let mut equality_uses = Vec::new();

    for action in &domain.actions {
        c.check_typed(&action.params);
        let scope: HashMap<&str, &str> = action.params.iter().map(|p| (p.name.as_str(), p.ty.as_str())).collect();
        c.condition(&action.precondition, &scope);
        c.effect(&action.effect, &scope);

        if action.precondition.has_comparison() {
            numeric_uses.push(action.span.clone());
        }
        for (op, target, _) in action.effect.updates() {
            if !(cost_req && is_cost_only_update(op, target)) {
                numeric_uses.push(target.span.clone());
            }
        }
        if action.precondition.has_negation() {
            negation_uses.push(action.span.clone());
        }
        if action.precondition.has_equality() {
            equality_uses.push(action.span.clone());
        }
    }
    if !numeric_req {
        let only_cost = domain.functions.iter().all(|f| f.name == TOTAL_COST && f.params.is_empty());
        if !domain.functions.is_empty() && !(cost_req && only_cost) {
            numeric_uses.insert(0, domain.functions[0].span.clone());
        }
        if let Some(span) = numeric_uses.first() {
            c.warning(
                Code::MissingRequirement,
                span,
                "numeric fluents are used but neither :fluents nor :numeric-fluents is required".to_string(),
            );
        }
    }
    if !domain.has_requirement(Requirement::NegativePreconditions) {
        if let Some(span) = negation_uses.first() {
            c.warning(
                Code::MissingRequirement,
                span,
                "negative preconditions are used but :negative-preconditions is not required".to_string(),
            );
        }
    }
    if !domain.has_requirement(Requirement::Equality) {
        if let Some(span) = equality_uses.first() {
            c.warning(Code::MissingRequirement, span, "equality is used but :equality is not required".to_string());
        }
    }

    CheckReport::from_diagnostics(c.out)
}

/// Checks `problem` against `domain`. Does not repeat the domain checks;
/// run [`check_domain`] as well for a full verdict.
pub fn check_problem(domain: &Domain, problem: &Problem) -> CheckReport {
    let mut c = Checker { domain, objects: object_table(domain, Some(problem)), out: Vec::new() };

    if problem.domain_name != domain.name {
        c.warning(
            Code::DomainNameMismatch,
            &problem.domain_span,
            format!("problem refers to domain '{}' but the domain is named '{}'", problem.domain_name, domain.name),
        );
    }

    c.check_typed(&problem.objects);
    c.duplicates(problem.objects.iter().map(|n| (n.name.as_str(), &n.span)), Code::DuplicateObject, "object");
    for o in &problem.objects {
        if let Some(constant) = domain.constants.iter().find(|k| k.name == o.name) {
            c.out.push(
                Diagnostic::warning(
                    Code::ShadowedConstant,
                    o.span.clone(),
                    format!("object '{}' shadows the domain constant of the same name", o.name),
                )
                .with_related(constant.span.clone()),
            );
        }
    }

    let empty = HashMap::new();
    for atom in &problem.init.atoms {
        c.application(Kind::Predicate, &atom.predicate, &atom.terms, &atom.span, &empty);
    }
    for (fluent, _) in &problem.init.fluents {
        c.application(Kind::Function, &fluent.function, &fluent.terms, &fluent.span, &empty);
    }
    c.condition(&problem.goal, &empty);
    if let Some(metric) = &problem.metric {
        c.numeric(&metric.expr, &empty);
    }

    let initialized: HashSet<(&str, &[Term])> =
        problem.init.fluents.iter().map(|(f, _)| (f.function.as_str(), f.terms.as_slice())).collect();
    let mut read: Vec<&FluentRef> = Vec::new();
    problem.goal.visit_fluents(&mut |f| read.push(f));
    if let Some(metric) = &problem.metric {
        read.extend(metric.expr.fluents());
    }
    let mut reported = HashSet::new();
    for f in read {
        if domain.function(&f.function).is_some()
            && !initialized.contains(&(f.function.as_str(), f.terms.as_slice()))
            && reported.insert(f.to_string())
        {
            c.warning(
                Code::UninitializedFluent,
                &f.span,
                format!("fluent {f} is read by the goal or metric but never initialized"),
            );
        }
    }

    CheckReport::from_diagnostics(c.out)
}

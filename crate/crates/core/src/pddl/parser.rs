//! Recursive-descent interpretation of s-expressions as PDDL domains and
//! problems. Each section is interpreted independently so that one broken
//! section does not hide errors in the others.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use super::ast::*;
use super::lexer::{end_of_input, TokenKind};
use super::sexpr::{read_all, SExpr};
use crate::diagnostic::{has_errors, Code, Diagnostic, SourceSpan};
use crate::number::int;

/// A successfully parsed value together with any non-fatal findings.
#[derive(Clone, Debug)]
pub struct Parsed<T> {
    pub ast: T,
    pub warnings: Vec<Diagnostic>,
}

pub type ParseResult<T> = Result<Parsed<T>, Vec<Diagnostic>>;

pub fn parse_domain(text: &str) -> ParseResult<Domain> {
    parse_domain_in(text, "<domain>")
}

pub fn parse_problem(text: &str) -> ParseResult<Problem> {
    parse_problem_in(text, "<problem>")
}

/// Parses a domain, attributing spans to `file`.
pub fn parse_domain_in(text: &str, file: &str) -> ParseResult<Domain> {
    let mut p = Parser::new(file);
    let domain = p.document(text, "domain").and_then(|(name, sections, span)| {
        let name = name?;
        Some(p.domain(name, sections, span))
    });
    p.finish(domain)
}

/// Parses a problem, attributing spans to `file`.
pub fn parse_problem_in(text: &str, file: &str) -> ParseResult<Problem> {
    let mut p = Parser::new(file);
    let problem = p.document(text, "problem").and_then(|(name, sections, span)| {
        let name = name?;
        p.problem(name, sections, span)
    });
    p.finish(problem)
}

const UNSUPPORTED_CONDITIONS: &[&str] = &["or", "imply", "forall", "exists", "preference", "when"];

struct Parser {
    file: Arc<str>,
    diagnostics: Vec<Diagnostic>,
}

type Document = (Option<String>, Vec<SExpr>, SourceSpan);

impl Parser {
    fn new(file: &str) -> Self {
        Parser { file: Arc::from(file), diagnostics: Vec::new() }
    }

    fn finish<T>(self, value: Option<T>) -> ParseResult<T> {
        match value {
            Some(ast) if !has_errors(&self.diagnostics) => Ok(Parsed { ast, warnings: self.diagnostics }),
            _ => Err(self.diagnostics),
        }
    }

    fn error(&mut self, code: Code, span: &SourceSpan, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::error(code, span.clone(), message));
    }

    fn warning(&mut self, code: Code, span: &SourceSpan, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::warning(code, span.clone(), message));
    }

    fn unexpected(&mut self, expr: &SExpr, expected: &str) {
        let msg = format!("expected {expected}, found {}", expr.describe());
        self.error(Code::UnexpectedToken, expr.span(), msg);
    }

    /// Reads `(define (<kind> NAME) sections...)` and returns the name and
    /// the remaining section expressions.
    fn document(&mut self, text: &str, kind: &str) -> Option<Document> {
        let (top, diags) = read_all(text, &self.file);
        self.diagnostics.extend(diags);
        let mut define = None;
        for expr in top {
            if define.is_none() && expr.head() == Some("define") {
                define = Some(expr);
            } else {
                self.unexpected(&expr, "a single (define ...) form");
            }
        }
        let Some(define) = define else {
            let eof = end_of_input(text, &self.file);
            self.error(Code::MissingSection, &eof, format!("expected (define ({kind} NAME) ...)"));
            return None;
        };
        let span = define.span().clone();
        let items = define.as_list().unwrap_or_default();
        let Some(header) = items.get(1) else {
            self.error(Code::MissingSection, &span, format!("missing ({kind} NAME) header"));
            return None;
        };
        let name = match header.as_list() {
            Some([h, n]) if h.ident() == Some(kind) => match n.ident() {
                Some(name) => Some(name.to_string()),
                None => {
                    self.unexpected(n, &format!("{kind} name"));
                    None
                }
            },
            _ => {
                self.unexpected(header, &format!("({kind} NAME)"));
                None
            }
        };
        Some((name, items[2..].to_vec(), span))
    }

    // ---- domain ----------------------------------------------------------

    fn domain(&mut self, name: String, sections: Vec<SExpr>, span: SourceSpan) -> Domain {
        let mut domain = Domain {
            name,
            requirements: BTreeSet::new(),
            types: TypeTree::new(),
            constants: Vec::new(),
            predicates: Vec::new(),
            functions: Vec::new(),
            actions: Vec::new(),
            span,
        };
        for section in &sections {
            let Some(items) = section.as_list() else {
                self.unexpected(section, "a section");
                continue;
            };
            let Some(keyword) = items.first().and_then(SExpr::keyword) else {
                self.unexpected(section, "a section starting with a keyword");
                continue;
            };
            let body = &items[1..];
            match keyword {
                "requirements" => self.requirements(body, &mut domain.requirements),
                "types" => self.types(body, &mut domain.types),
                "constants" => domain.constants.extend(self.typed_list(body, false)),
                "predicates" => {
                    for decl in body {
                        if let Some(d) = self.declaration(decl) {
                            domain.predicates.push(d);
                        }
                    }
                }
                "functions" => self.functions(body, &mut domain.functions),
                "action" => {
                    if let Some(a) = self.action(section, body) {
                        domain.actions.push(a);
                    }
                }
                "durative-action" | "derived" | "constraints" | "process" | "event" => {
                    self.error(
                        Code::UnsupportedFeature,
                        section.span(),
                        format!("unsupported feature: :{keyword} sections are not supported"),
                    );
                }
                other => {
                    self.error(Code::UnknownSection, section.span(), format!("unknown domain section :{other}"));
                }
            }
        }
        domain
    }

    fn requirements(&mut self, body: &[SExpr], into: &mut BTreeSet<Requirement>) {
        for item in body {
            match item.keyword() {
                Some(k) => match Requirement::from_keyword(k) {
                    Some(r) => {
                        into.insert(r);
                    }
                    None => {
                        self.error(Code::UnsupportedRequirement, item.span(), format!("unsupported requirement :{k}"))
                    }
                },
                None => self.unexpected(item, "a requirement keyword"),
            }
        }
    }

    fn types(&mut self, body: &[SExpr], tree: &mut TypeTree) {
        let declared = self.typed_list(body, false);
        for t in &declared {
            if let Err(existing) = tree.declare(&t.name, &t.ty, t.span.clone()) {
                self.error(
                    Code::MalformedTypedList,
                    &t.span,
                    format!("type '{}' declared with parents '{existing}' and '{}'", t.name, t.ty),
                );
            }
        }
        for t in &declared {
            tree.declare_implicit(&t.ty, t.span.clone());
        }
    }

    /// Parses `a b - t c - u d`. Untyped trailing names get type `object`.
    fn typed_list(&mut self, items: &[SExpr], variables: bool) -> Vec<TypedName> {
        let mut out = Vec::new();
        let mut pending: Vec<(String, SourceSpan)> = Vec::new();
        let mut iter = items.iter();
        while let Some(item) = iter.next() {
            match (item.token(), variables) {
                (Some(TokenKind::Var(v)), true) | (Some(TokenKind::Ident(v)), false) => {
                    pending.push((v.clone(), item.span().clone()));
                }
                (Some(TokenKind::Dash), _) => {
                    let Some(ty_expr) = iter.next() else {
                        self.error(Code::MalformedTypedList, item.span(), "'-' must be followed by a type name");
                        break;
                    };
                    let ty = match ty_expr.ident() {
                        Some(t) => t.to_string(),
                        None if ty_expr.head() == Some("either") => {
                            self.error(
                                Code::UnsupportedFeature,
                                ty_expr.span(),
                                "unsupported feature: (either ...) types are not supported",
                            );
                            pending.clear();
                            continue;
                        }
                        None => {
                            self.error(
                                Code::MalformedTypedList,
                                ty_expr.span(),
                                format!("expected a type name, found {}", ty_expr.describe()),
                            );
                            pending.clear();
                            continue;
                        }
                    };
                    if pending.is_empty() {
                        self.error(Code::MalformedTypedList, item.span(), "type annotation without names");
                    }
                    out.extend(pending.drain(..).map(|(name, span)| TypedName { name, ty: ty.clone(), span }));
                }
                _ => {
                    let what = if variables { "a variable" } else { "a name" };
                    self.error(
                        Code::MalformedTypedList,
                        item.span(),
                        format!("expected {what} or '-', found {}", item.describe()),
                    );
                }
            }
        }
        out.extend(pending.into_iter().map(|(name, span)| TypedName { name, ty: OBJECT_TYPE.to_string(), span }));
        out
    }

    fn parameters(&mut self, items: &[SExpr]) -> Vec<TypedName> {
        let params = self.typed_list(items, true);
        let mut seen = HashSet::new();
        for p in &params {
            if !seen.insert(p.name.as_str()) {
                self.error(Code::DuplicateParameter, &p.span, format!("duplicate parameter ?{}", p.name));
            }
        }
        params
    }

    /// `(name ?a - t ?b)` as used in :predicates and :functions.
    fn declaration(&mut self, expr: &SExpr) -> Option<PredicateDecl> {
        let Some(items) = expr.as_list() else {
            self.unexpected(expr, "a declaration (name ?param ...)");
            return None;
        };
        let Some(name) = items.first().and_then(SExpr::ident) else {
            self.unexpected(expr, "a declaration (name ?param ...)");
            return None;
        };
        Some(PredicateDecl { name: name.to_string(), params: self.parameters(&items[1..]), span: expr.span().clone() })
    }

    fn functions(&mut self, body: &[SExpr], into: &mut Vec<FunctionDecl>) {
        let mut iter = body.iter().peekable();
        while let Some(item) = iter.next() {
            if let Some(decl) = self.declaration(item) {
                into.push(decl);
            }
            if iter.peek().and_then(|e| e.token()) == Some(&TokenKind::Dash) {
                let dash = iter.next().expect("peeked");
                match iter.next() {
                    Some(t) if t.ident() == Some("number") => {}
                    Some(t) => self.error(
                        Code::UnsupportedFeature,
                        t.span(),
                        format!("unsupported feature: function type {} (only number)", t.describe()),
                    ),
                    None => self.error(Code::MalformedTypedList, dash.span(), "'-' must be followed by a type"),
                }
            }
        }
    }

    fn action(&mut self, section: &SExpr, body: &[SExpr]) -> Option<ActionSchema> {
        let Some(name) = body.first().and_then(SExpr::ident) else {
            self.unexpected(section, "(:action NAME ...)");
            return None;
        };
        let mut params = Vec::new();
        let mut precondition = Condition::truth();
        let mut effect = Effect::default();
        let mut rest = body[1..].iter();
        while let Some(key) = rest.next() {
            let Some(k) = key.keyword() else {
                self.unexpected(key, ":parameters, :precondition or :effect");
                continue;
            };
            let Some(value) = rest.next() else {
                self.error(Code::UnexpectedToken, key.span(), format!(":{k} requires a value"));
                break;
            };
            match k {
                "parameters" => match value.as_list() {
                    Some(items) => params = self.parameters(items),
                    None => self.unexpected(value, "a parameter list"),
                },
                "precondition" => {
                    if let Some(c) = self.condition(value, true) {
                        precondition = c;
                    }
                }
                "effect" => {
                    if let Some(e) = self.effect(value) {
                        effect = e;
                    }
                }
                other => self.error(Code::UnexpectedToken, key.span(), format!("unexpected action key :{other}")),
            }
        }
        Some(ActionSchema { name: name.to_string(), params, precondition, effect, span: section.span().clone() })
    }

    // ---- conditions, expressions, effects ---------------------------------

    fn term(&mut self, expr: &SExpr, allow_vars: bool) -> Option<Term> {
        match expr.token() {
            Some(TokenKind::Ident(o)) => Some(Term::Object(o.clone())),
            Some(TokenKind::Var(v)) if allow_vars => Some(Term::Var(v.clone())),
            Some(TokenKind::Var(_)) => {
                self.error(
                    Code::UnexpectedToken,
                    expr.span(),
                    format!("variable {} is not allowed here", expr.describe()),
                );
                None
            }
            _ => {
                self.unexpected(expr, "an object name or variable");
                None
            }
        }
    }

    fn terms(&mut self, items: &[SExpr], allow_vars: bool) -> Option<Vec<Term>> {
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for item in items {
            match self.term(item, allow_vars) {
                Some(t) => out.push(t),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn atom(&mut self, expr: &SExpr, allow_vars: bool) -> Option<Atom> {
        let items = expr.as_list()?;
        let Some(predicate) = items.first().and_then(SExpr::ident) else {
            self.unexpected(expr, "an atom (predicate args...)");
            return None;
        };
        let terms = self.terms(&items[1..], allow_vars)?;
        Some(Atom { predicate: predicate.to_string(), terms, span: expr.span().clone() })
    }

    fn fluent_ref(&mut self, expr: &SExpr, allow_vars: bool) -> Option<FluentRef> {
        let atom = self.atom(expr, allow_vars)?;
        Some(FluentRef { function: atom.predicate, terms: atom.terms, span: atom.span })
    }

    fn unsupported(&mut self, expr: &SExpr, construct: &str) {
        self.error(
            Code::UnsupportedFeature,
            expr.span(),
            format!("unsupported feature: ({construct} ...) is outside the supported PDDL fragment"),
        );
    }

    fn condition(&mut self, expr: &SExpr, allow_vars: bool) -> Option<Condition> {
        let Some(items) = expr.as_list() else {
            self.unexpected(expr, "a condition");
            return None;
        };
        if items.is_empty() {
            return Some(Condition::truth());
        }
        let head = match &items[0].token() {
            Some(TokenKind::Ident(h)) => h.as_str(),
            _ => {
                self.unexpected(&items[0], "a predicate or connective");
                return None;
            }
        };
        let args = &items[1..];
        match head {
            "and" => {
                let mut parts = Vec::with_capacity(args.len());
                let mut ok = true;
                for a in args {
                    match self.condition(a, allow_vars) {
                        Some(c) => parts.push(c),
                        None => ok = false,
                    }
                }
                ok.then(|| Condition::and(parts))
            }
            "not" => {
                let [inner] = args else {
                    self.error(Code::UnexpectedToken, expr.span(), "(not ...) takes exactly one argument");
                    return None;
                };
                match self.condition(inner, allow_vars)? {
                    c @ (Condition::Atom(_) | Condition::Equality { .. }) => Some(Condition::Not(Box::new(c))),
                    _ => {
                        self.error(
                            Code::UnsupportedFeature,
                            expr.span(),
                            "unsupported feature: (not ...) may only wrap an atom or an equality",
                        );
                        None
                    }
                }
            }
            h if UNSUPPORTED_CONDITIONS.contains(&h) => {
                self.unsupported(expr, h);
                None
            }
            "=" if args.len() == 2
                && args.iter().all(|a| matches!(a.token(), Some(TokenKind::Ident(_) | TokenKind::Var(_)))) =>
            {
                let lhs = self.term(&args[0], allow_vars)?;
                let rhs = self.term(&args[1], allow_vars)?;
                Some(Condition::Equality { lhs, rhs, span: expr.span().clone() })
            }
            h if CmpOp::from_symbol(h).is_some() => {
                let op = CmpOp::from_symbol(h).expect("checked");
                let [l, r] = args else {
                    self.error(Code::UnexpectedToken, expr.span(), format!("({h} ...) takes exactly two arguments"));
                    return None;
                };
                let lhs = self.numeric(l, allow_vars);
                let rhs = self.numeric(r, allow_vars);
                Some(Condition::Comparison { op, lhs: lhs?, rhs: rhs?, span: expr.span().clone() })
            }
            _ => self.atom(expr, allow_vars).map(Condition::Atom),
        }
    }

    fn numeric(&mut self, expr: &SExpr, allow_vars: bool) -> Option<NumericExpr> {
        match expr {
            SExpr::Atom(token) => match &token.kind {
                TokenKind::Number(v) => Some(NumericExpr::Const(v.clone())),
                _ => {
                    self.unexpected(expr, "a number or a (function ...) term");
                    None
                }
            },
            SExpr::List { items, .. } => {
                let op = match items.first().and_then(SExpr::token) {
                    Some(TokenKind::Dash) => Some(ArithOp::Sub),
                    Some(TokenKind::Ident(s)) => ArithOp::from_symbol(s),
                    _ => None,
                };
                let Some(op) = op else {
                    return self.fluent_ref(expr, allow_vars).map(NumericExpr::Fluent);
                };
                let args = &items[1..];
                match (op, args) {
                    (ArithOp::Sub, [only]) => {
                        let inner = self.numeric(only, allow_vars)?;
                        Some(NumericExpr::BinOp(ArithOp::Sub, Box::new(NumericExpr::Const(int(0))), Box::new(inner)))
                    }
                    (_, [first, second, more @ ..]) if more.is_empty() || matches!(op, ArithOp::Add | ArithOp::Mul) => {
                        let mut acc = self.numeric(first, allow_vars);
                        for next in std::iter::once(second).chain(more) {
                            let rhs = self.numeric(next, allow_vars);
                            acc = match (acc, rhs) {
                                (Some(l), Some(r)) => Some(NumericExpr::BinOp(op, Box::new(l), Box::new(r))),
                                _ => None,
                            };
                        }
                        acc
                    }
                    _ => {
                        self.error(
                            Code::UnexpectedToken,
                            expr.span(),
                            format!("wrong number of arguments for ({} ...)", op.symbol()),
                        );
                        None
                    }
                }
            }
        }
    }

    fn effect(&mut self, expr: &SExpr) -> Option<Effect> {
        let mut effects = Vec::new();
        let ok = self.effect_into(expr, &mut effects);
        let mut unique: Vec<AtomicEffect> = Vec::with_capacity(effects.len());
        for e in effects {
            if unique.contains(&e) {
                let span = match &e {
                    AtomicEffect::Add(a) | AtomicEffect::Delete(a) => a.span.clone(),
                    AtomicEffect::Update { target, .. } => target.span.clone(),
                };
                self.error(Code::DuplicateEffect, &span, format!("duplicate effect {e}"));
            } else {
                unique.push(e);
            }
        }
        ok.then_some(Effect { effects: unique })
    }

    fn effect_into(&mut self, expr: &SExpr, out: &mut Vec<AtomicEffect>) -> bool {
        let Some(items) = expr.as_list() else {
            self.unexpected(expr, "an effect");
            return false;
        };
        let Some(head) = items.first().map(|h| h.ident()) else {
            return true;
        };
        let Some(head) = head else {
            self.unexpected(&items[0], "an effect");
            return false;
        };
        let args = &items[1..];
        match head {
            "and" => {
                let mut ok = true;
                for a in args {
                    ok &= self.effect_into(a, out);
                }
                ok
            }
            "not" => match args {
                [inner] if inner.as_list().is_some() => match self.atom(inner, true) {
                    Some(a) => {
                        out.push(AtomicEffect::Delete(a));
                        true
                    }
                    None => false,
                },
                _ => {
                    self.error(Code::UnexpectedToken, expr.span(), "(not ...) in an effect must wrap one atom");
                    false
                }
            },
            "forall" | "when" => {
                self.unsupported(expr, head);
                false
            }
            h if UpdateOp::from_keyword(h).is_some() => {
                let op = UpdateOp::from_keyword(h).expect("checked");
                let [target, value] = args else {
                    self.error(Code::UnexpectedToken, expr.span(), format!("({h} ...) takes a fluent and a value"));
                    return false;
                };
                let target = if target.as_list().is_some() {
                    self.fluent_ref(target, true)
                } else {
                    self.unexpected(target, "a fluent (function args...)");
                    None
                };
                let value = self.numeric(value, true);
                match (target, value) {
                    (Some(target), Some(value)) => {
                        out.push(AtomicEffect::Update { op, target, value });
                        true
                    }
                    _ => false,
                }
            }
            _ => match self.atom(expr, true) {
                Some(a) => {
                    out.push(AtomicEffect::Add(a));
                    true
                }
                None => false,
            },
        }
    }

    // ---- problem ---------------------------------------------------------

    fn problem(&mut self, name: String, sections: Vec<SExpr>, span: SourceSpan) -> Option<Problem> {
        let mut domain_name = None;
        let mut domain_span = span.clone();
        let mut requirements = BTreeSet::new();
        let mut objects = Vec::new();
        let mut init = Init::default();
        let mut goal = None;
        let mut metric = None;
        for section in &sections {
            let Some(items) = section.as_list() else {
                self.unexpected(section, "a section");
                continue;
            };
            let Some(keyword) = items.first().and_then(SExpr::keyword) else {
                self.unexpected(section, "a section starting with a keyword");
                continue;
            };
            let body = &items[1..];
            match keyword {
                "domain" => match body {
                    [n] if n.ident().is_some() => {
                        domain_name = n.ident().map(str::to_string);
                        domain_span = section.span().clone();
                    }
                    _ => self.unexpected(section, "(:domain NAME)"),
                },
                "requirements" => self.requirements(body, &mut requirements),
                "objects" => objects.extend(self.typed_list(body, false)),
                "init" => self.init(body, &mut init),
                "goal" => match body {
                    [g] => goal = self.condition(g, false),
                    _ => self.error(Code::UnexpectedToken, section.span(), "(:goal ...) takes exactly one condition"),
                },
                "metric" => metric = self.metric(section, body),
                "constraints" | "length" => self.error(
                    Code::UnsupportedFeature,
                    section.span(),
                    format!("unsupported feature: :{keyword} sections are not supported"),
                ),
                other => self.error(Code::UnknownSection, section.span(), format!("unknown problem section :{other}")),
            }
        }
        let Some(domain_name) = domain_name else {
            self.error(Code::MissingSection, &span, "missing (:domain NAME)");
            return None;
        };
        let Some(goal) = goal else {
            if !has_errors(&self.diagnostics) {
                self.error(Code::MissingSection, &span, "missing (:goal ...)");
            }
            return None;
        };
        Some(Problem { name, domain_name, requirements, objects, init, goal, metric, span, domain_span })
    }

    fn init(&mut self, body: &[SExpr], init: &mut Init) {
        let mut negated: Vec<Atom> = Vec::new();
        for item in body {
            let Some(items) = item.as_list() else {
                self.unexpected(item, "an initial fact");
                continue;
            };
            match items.first().and_then(SExpr::ident) {
                Some("=") => {
                    let [_, target, value] = items else {
                        self.error(Code::UnexpectedToken, item.span(), "(= (f ...) VALUE) takes two arguments");
                        continue;
                    };
                    let target = if target.as_list().is_some() {
                        self.fluent_ref(target, false)
                    } else {
                        self.unexpected(target, "a fluent (function args...)");
                        None
                    };
                    let value = match value.token() {
                        Some(TokenKind::Number(v)) => Some(v.clone()),
                        _ => {
                            self.unexpected(value, "a number");
                            None
                        }
                    };
                    let (Some(target), Some(value)) = (target, value) else {
                        continue;
                    };
                    if let Some((prev, _)) = init.fluents.iter().find(|(f, _)| f == &target) {
                        let prev_span = prev.span.clone();
                        self.diagnostics.push(
                            Diagnostic::error(
                                Code::DuplicateFluentInit,
                                target.span.clone(),
                                format!("fluent {target} is initialized more than once"),
                            )
                            .with_related(prev_span),
                        );
                        continue;
                    }
                    init.fluents.push((target, value));
                }
                Some("not") => match items {
                    [_, inner] => {
                        if let Some(a) = self.atom(inner, false) {
                            negated.push(a);
                        }
                    }
                    _ => self.error(Code::UnexpectedToken, item.span(), "(not ...) takes one atom"),
                },
                Some("at") if matches!(items.get(1).and_then(SExpr::token), Some(TokenKind::Number(_))) => {
                    self.unsupported(item, "at");
                }
                Some(_) => {
                    let Some(atom) = self.atom(item, false) else { continue };
                    if init.atoms.contains(&atom) {
                        self.warning(Code::DuplicateInitAtom, &atom.span, format!("duplicate initial fact {atom}"));
                    } else {
                        init.atoms.push(atom);
                    }
                }
                None => self.unexpected(item, "an initial fact"),
            }
        }
        for neg in negated {
            if let Some(pos) = init.atoms.iter().find(|a| **a == neg) {
                let pos_span = pos.span.clone();
                self.diagnostics.push(
                    Diagnostic::error(
                        Code::ContradictoryInit,
                        neg.span.clone(),
                        format!("{neg} is stated both true and false in :init"),
                    )
                    .with_related(pos_span),
                );
            }
        }
    }

    fn metric(&mut self, section: &SExpr, body: &[SExpr]) -> Option<Metric> {
        let [direction, expr] = body else {
            self.error(Code::UnexpectedToken, section.span(), "(:metric minimize|maximize EXPR)");
            return None;
        };
        let direction = match direction.ident() {
            Some("minimize") => Optimization::Minimize,
            Some("maximize") => Optimization::Maximize,
            _ => {
                self.unexpected(direction, "minimize or maximize");
                return None;
            }
        };
        let expr = self.numeric(expr, false)?;
        Some(Metric { direction, expr })
    }
}

//! Typed syntax trees for PDDL domains, problems and plans.
//!
//! All names are stored lower-cased. Spans are carried for diagnostics but
//! are ignored by `PartialEq` (see [`SourceSpan`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagnostic::SourceSpan;
use crate::number::{format_rational, Rational};

pub const OBJECT_TYPE: &str = "object";
pub const TOTAL_COST: &str = "total-cost";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
    Equality,
    Fluents,
    NumericFluents,
    ActionCosts,
}

impl Requirement {
    pub const ALL: [Requirement; 7] = [
        Requirement::Strips,
        Requirement::Typing,
        Requirement::NegativePreconditions,
        Requirement::Equality,
        Requirement::Fluents,
        Requirement::NumericFluents,
        Requirement::ActionCosts,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => "strips",
            Requirement::Typing => "typing",
            Requirement::NegativePreconditions => "negative-preconditions",
            Requirement::Equality => "equality",
            Requirement::Fluents => "fluents",
            Requirement::NumericFluents => "numeric-fluents",
            Requirement::ActionCosts => "action-costs",
        }
    }

    pub fn from_keyword(keyword: &str) -> Option<Requirement> {
        Requirement::ALL.into_iter().find(|r| r.keyword() == keyword)
    }
}

/// Declared types and their parents. `object` is the implicit root and is
/// never stored as a key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeTree {
    parents: BTreeMap<String, String>,
    spans: BTreeMap<String, SourceSpan>,
}

impl TypeTree {
    pub fn new() -> Self {
        TypeTree::default()
    }

    /// Declares `name` with the given parent. Returns the previously declared
    /// parent if the type was already declared with a different one.
    pub fn declare(&mut self, name: &str, parent: &str, span: SourceSpan) -> Result<(), String> {
        if name == OBJECT_TYPE {
            return if parent == OBJECT_TYPE { Ok(()) } else { Err(parent.to_string()) };
        }
        match self.parents.get(name) {
            Some(existing) if existing != parent => Err(existing.clone()),
            Some(_) => Ok(()),
            None => {
                self.parents.insert(name.to_string(), parent.to_string());
                self.spans.insert(name.to_string(), span);
                Ok(())
            }
        }
    }

    /// Declares `name` as a child of `object` unless it already exists.
    pub fn declare_implicit(&mut self, name: &str, span: SourceSpan) {
        if name != OBJECT_TYPE && !self.parents.contains_key(name) {
            self.parents.insert(name.to_string(), OBJECT_TYPE.to_string());
            self.spans.insert(name.to_string(), span);
        }
    }

    pub fn is_declared(&self, name: &str) -> bool {
        name == OBJECT_TYPE || self.parents.contains_key(name)
    }

    pub fn parent(&self, name: &str) -> Option<&str> {
        self.parents.get(name).map(String::as_str)
    }

    pub fn span(&self, name: &str) -> Option<&SourceSpan> {
        self.spans.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// Declared types (excluding `object`) with their parents, sorted by name.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parents.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// True when `ty` equals `ancestor` or inherits from it. Every type is a
    /// subtype of `object`. Cycles terminate and answer false.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT_TYPE || ty == ancestor {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut current = ty;
        while let Some(parent) = self.parents.get(current) {
            if parent == ancestor {
                return true;
            }
            if !seen.insert(current) {
                return false;
            }
            current = parent;
        }
        false
    }

    /// Names of types that take part in an inheritance cycle.
    pub fn cyclic_types(&self) -> Vec<&str> {
        self.parents
            .keys()
            .filter(|start| {
                let mut current = start.as_str();
                for _ in 0..=self.parents.len() {
                    match self.parents.get(current) {
                        Some(p) if p == *start => return true,
                        Some(p) => current = p,
                        None => return false,
                    }
                }
                false
            })
            .map(String::as_str)
            .collect()
    }
}

/// A name with its declared type: action parameters (the name is a variable
/// without `?`), constants and problem objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Object(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Object(o) => f.write_str(o),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub terms: Vec<Term>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluentRef {
    pub function: String,
    pub terms: Vec<Term>,
    pub span: SourceSpan,
}

fn write_application(f: &mut fmt::Formatter<'_>, head: &str, terms: &[Term]) -> fmt::Result {
    write!(f, "({head}")?;
    for t in terms {
        write!(f, " {t}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_application(f, &self.predicate, &self.terms)
    }
}

impl fmt::Display for FluentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_application(f, &self.function, &self.terms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn from_symbol(s: &str) -> Option<ArithOp> {
        Some(match s {
            "+" => ArithOp::Add,
            "-" => ArithOp::Sub,
            "*" => ArithOp::Mul,
            "/" => ArithOp::Div,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumericExpr {
    Const(Rational),
    Fluent(FluentRef),
    BinOp(ArithOp, Box<NumericExpr>, Box<NumericExpr>),
}

impl NumericExpr {
    pub fn fluents(&self) -> Vec<&FluentRef> {
        let mut out = Vec::new();
        self.collect_fluents(&mut out);
        out
    }

    fn collect_fluents<'a>(&'a self, out: &mut Vec<&'a FluentRef>) {
        match self {
            NumericExpr::Const(_) => {}
            NumericExpr::Fluent(f) => out.push(f),
            NumericExpr::BinOp(_, l, r) => {
                l.collect_fluents(out);
                r.collect_fluents(out);
            }
        }
    }
}

impl fmt::Display for NumericExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericExpr::Const(v) => f.write_str(&format_rational(v)),
            NumericExpr::Fluent(r) => r.fmt(f),
            NumericExpr::BinOp(op, l, r) => write!(f, "({} {l} {r})", op.symbol()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Atom(Atom),
    Equality {
        lhs: Term,
        rhs: Term,
        span: SourceSpan,
    },
    Comparison {
        op: CmpOp,
        lhs: NumericExpr,
        rhs: NumericExpr,
        span: SourceSpan,
    },
    /// Only ever wraps an `Atom` or an `Equality`.
    Not(Box<Condition>),
    /// Never directly contains another `And`.
    And(Vec<Condition>),
}

impl Condition {
    pub fn truth() -> Condition {
        Condition::And(Vec::new())
    }

    /// Builds a conjunction, splicing nested conjunctions into one level.
    pub fn and(parts: Vec<Condition>) -> Condition {
        let mut flat = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                Condition::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Condition::And(flat)
    }

    /// Top-level conjuncts; a non-conjunction is its own single conjunct.
    pub fn conjuncts(&self) -> Vec<&Condition> {
        match self {
            Condition::And(parts) => parts.iter().collect(),
            other => vec![other],
        }
    }

    /// Visits every atom together with its polarity (true = positive).
    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom, bool)) {
        match self {
            Condition::Atom(a) => f(a, true),
            Condition::Not(inner) => {
                if let Condition::Atom(a) = inner.as_ref() {
                    f(a, false)
                }
            }
            Condition::And(parts) => parts.iter().for_each(|p| p.visit_atoms(f)),
            Condition::Equality { .. } | Condition::Comparison { .. } => {}
        }
    }

    pub fn visit_fluents<'a>(&'a self, f: &mut impl FnMut(&'a FluentRef)) {
        match self {
            Condition::Comparison { lhs, rhs, .. } => lhs.fluents().into_iter().chain(rhs.fluents()).for_each(f),
            Condition::Not(inner) => inner.visit_fluents(f),
            Condition::And(parts) => parts.iter().for_each(|p| p.visit_fluents(f)),
            Condition::Atom(_) | Condition::Equality { .. } => {}
        }
    }

    pub fn has_comparison(&self) -> bool {
        match self {
            Condition::Comparison { .. } => true,
            Condition::Not(inner) => inner.has_comparison(),
            Condition::And(parts) => parts.iter().any(Condition::has_comparison),
            Condition::Atom(_) | Condition::Equality { .. } => false,
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            Condition::Not(_) => true,
            Condition::And(parts) => parts.iter().any(Condition::has_negation),
            _ => false,
        }
    }

    pub fn has_equality(&self) -> bool {
        match self {
            Condition::Equality { .. } => true,
            Condition::Not(inner) => inner.has_equality(),
            Condition::And(parts) => parts.iter().any(Condition::has_equality),
            _ => false,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Atom(a) => a.fmt(f),
            Condition::Equality { lhs, rhs, .. } => write!(f, "(= {lhs} {rhs})"),
            Condition::Comparison { op, lhs, rhs, .. } => write!(f, "({} {lhs} {rhs})", op.symbol()),
            Condition::Not(inner) => write!(f, "(not {inner})"),
            Condition::And(parts) => {
                f.write_str("(and")?;
                for p in parts {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpdateOp {
    Assign,
    Increase,
    Decrease,
    ScaleUp,
    ScaleDown,
}

impl UpdateOp {
    pub fn keyword(self) -> &'static str {
        match self {
            UpdateOp::Assign => "assign",
            UpdateOp::Increase => "increase",
            UpdateOp::Decrease => "decrease",
            UpdateOp::ScaleUp => "scale-up",
            UpdateOp::ScaleDown => "scale-down",
        }
    }

    pub fn from_keyword(s: &str) -> Option<UpdateOp> {
        Some(match s {
            "assign" => UpdateOp::Assign,
            "increase" => UpdateOp::Increase,
            "decrease" => UpdateOp::Decrease,
            "scale-up" => UpdateOp::ScaleUp,
            "scale-down" => UpdateOp::ScaleDown,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomicEffect {
    Add(Atom),
    Delete(Atom),
    Update { op: UpdateOp, target: FluentRef, value: NumericExpr },
}

impl fmt::Display for AtomicEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicEffect::Add(a) => a.fmt(f),
            AtomicEffect::Delete(a) => write!(f, "(not {a})"),
            AtomicEffect::Update { op, target, value } => {
                write!(f, "({} {target} {value})", op.keyword())
            }
        }
    }
}

/// Flat list of atomic effects without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Effect {
    pub effects: Vec<AtomicEffect>,
}

impl Effect {
    pub fn adds(&self) -> impl Iterator<Item = &Atom> {
        self.effects.iter().filter_map(|e| match e {
            AtomicEffect::Add(a) => Some(a),
            _ => None,
        })
    }

    pub fn deletes(&self) -> impl Iterator<Item = &Atom> {
        self.effects.iter().filter_map(|e| match e {
            AtomicEffect::Delete(a) => Some(a),
            _ => None,
        })
    }

    pub fn updates(&self) -> impl Iterator<Item = (UpdateOp, &FluentRef, &NumericExpr)> {
        self.effects.iter().filter_map(|e| match e {
            AtomicEffect::Update { op, target, value } => Some((*op, target, value)),
            _ => None,
        })
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(and")?;
        for e in &self.effects {
            write!(f, " {e}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
    pub span: SourceSpan,
}

pub type FunctionDecl = PredicateDecl;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Condition,
    pub effect: Effect,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: BTreeSet<Requirement>,
    pub types: TypeTree,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub functions: Vec<FunctionDecl>,
    pub actions: Vec<ActionSchema>,
    pub span: SourceSpan,
}

impl Domain {
    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        let name = name.to_lowercase();
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|p| p.name == name)
    }

    pub fn has_requirement(&self, r: Requirement) -> bool {
        self.requirements.contains(&r)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Init {
    /// Ground atoms in first-appearance order, without duplicates.
    pub atoms: Vec<Atom>,
    /// Each fluent assigned at most once.
    pub fluents: Vec<(FluentRef, Rational)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Optimization {
    Minimize,
    Maximize,
}

impl Optimization {
    pub fn keyword(self) -> &'static str {
        match self {
            Optimization::Minimize => "minimize",
            Optimization::Maximize => "maximize",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    pub direction: Optimization,
    pub expr: NumericExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    pub requirements: BTreeSet<Requirement>,
    pub objects: Vec<TypedName>,
    pub init: Init,
    pub goal: Condition,
    pub metric: Option<Metric>,
    pub span: SourceSpan,
    /// Span of the `(:domain ...)` reference.
    pub domain_span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub name: String,
    pub args: Vec<String>,
    pub span: SourceSpan,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

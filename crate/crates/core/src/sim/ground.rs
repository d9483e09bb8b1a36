//! Lazy grounding of individual plan steps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::error::SimError;
use super::state::{GroundAtom, GroundFluent};
use crate::check::object_table;
use crate::number::{format_rational, Rational};
use crate::pddl::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundExpr {
    Const(Rational),
    Fluent(GroundFluent),
    BinOp(ArithOp, Box<GroundExpr>, Box<GroundExpr>),
}

impl GroundExpr {
    pub fn fluents(&self) -> Vec<&GroundFluent> {
        match self {
            GroundExpr::Const(_) => Vec::new(),
            GroundExpr::Fluent(f) => vec![f],
            GroundExpr::BinOp(_, l, r) => {
                let mut v = l.fluents();
                v.extend(r.fluents());
                v
            }
        }
    }
}

impl fmt::Display for GroundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundExpr::Const(v) => f.write_str(&format_rational(v)),
            GroundExpr::Fluent(g) => g.fmt(f),
            GroundExpr::BinOp(op, l, r) => write!(f, "({} {l} {r})", op.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundCondition {
    Atom(GroundAtom),
    Equality(String, String),
    Comparison { op: CmpOp, lhs: GroundExpr, rhs: GroundExpr },
    Not(Box<GroundCondition>),
    And(Vec<GroundCondition>),
}

impl GroundCondition {
    /// Top-level conjuncts, flattening nested conjunctions.
    pub fn conjuncts(&self) -> Vec<&GroundCondition> {
        match self {
            GroundCondition::And(parts) => parts.iter().flat_map(|p| p.conjuncts()).collect(),
            other => vec![other],
        }
    }
}

impl fmt::Display for GroundCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundCondition::Atom(a) => a.fmt(f),
            GroundCondition::Equality(l, r) => write!(f, "(= {l} {r})"),
            GroundCondition::Comparison { op, lhs, rhs } => write!(f, "({} {lhs} {rhs})", op.symbol()),
            GroundCondition::Not(inner) => write!(f, "(not {inner})"),
            GroundCondition::And(parts) => {
                f.write_str("(and")?;
                for p in parts {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundUpdate {
    pub op: UpdateOp,
    pub target: GroundFluent,
    pub value: GroundExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundEffect {
    pub adds: Vec<GroundAtom>,
    pub deletes: Vec<GroundAtom>,
    pub updates: Vec<GroundUpdate>,
}

impl fmt::Display for GroundEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(and")?;
        for a in &self.adds {
            write!(f, " {a}")?;
        }
        for d in &self.deletes {
            write!(f, " (not {d})")?;
        }
        for u in &self.updates {
            write!(f, " ({} {} {})", u.op.keyword(), u.target, u.value)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    pub precondition: GroundCondition,
    pub effect: GroundEffect,
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.schema)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A domain/problem pair with its merged object universe, ready to ground
/// plan steps on demand.
#[derive(Clone, Debug)]
pub struct World<'a> {
    pub domain: &'a Domain,
    pub problem: &'a Problem,
    objects: BTreeMap<String, String>,
}

impl<'a> World<'a> {
    pub fn new(domain: &'a Domain, problem: &'a Problem) -> Self {
        World { domain, problem, objects: object_table(domain, Some(problem)) }
    }

    /// Object name → declared type. Problem objects shadow domain constants.
    pub fn objects(&self) -> &BTreeMap<String, String> {
        &self.objects
    }

    pub fn ground_step(&self, name: &str, args: &[String]) -> Result<GroundAction, SimError> {
        let step_text = render_step(name, args);
        let schema = self
            .domain
            .action(name)
            .ok_or_else(|| SimError::UnknownAction { step: step_text.clone(), name: name.to_lowercase() })?;
        if schema.params.len() != args.len() {
            return Err(SimError::WrongArgCount { step: step_text, expected: schema.params.len(), found: args.len() });
        }
        let mut binding = HashMap::with_capacity(args.len());
        for (param, arg) in schema.params.iter().zip(args) {
            let arg = arg.to_lowercase();
            let Some(actual) = self.objects.get(&arg) else {
                return Err(SimError::UnknownObject { step: step_text, object: arg });
            };
            if !self.domain.types.is_subtype(actual, &param.ty) {
                return Err(SimError::ArgTypeIncompatible {
                    step: step_text,
                    arg,
                    expected: param.ty.clone(),
                    actual: actual.clone(),
                });
            }
            binding.insert(param.name.as_str(), arg);
        }
        let g = Grounder { binding: &binding };
        Ok(GroundAction {
            schema: schema.name.clone(),
            args: args.iter().map(|a| a.to_lowercase()).collect(),
            precondition: g.condition(&schema.precondition)?,
            effect: g.effect(&schema.effect)?,
        })
    }

    pub fn ground_goal(&self) -> Result<GroundCondition, SimError> {
        Grounder { binding: &HashMap::new() }.condition(&self.problem.goal)
    }

    pub fn ground_metric(&self) -> Result<Option<GroundExpr>, SimError> {
        let g = Grounder { binding: &HashMap::new() };
        self.problem.metric.as_ref().map(|m| g.expr(&m.expr)).transpose()
    }
}

fn render_step(name: &str, args: &[String]) -> String {
    let mut s = format!("({}", name.to_lowercase());
    for a in args {
        s.push(' ');
        s.push_str(&a.to_lowercase());
    }
    s.push(')');
    s
}

/// Substitutes bound objects for variables.
pub(crate) struct Grounder<'b> {
    pub binding: &'b HashMap<&'b str, String>,
}

impl Grounder<'_> {
    fn term(&self, t: &Term) -> Result<String, SimError> {
        match t {
            Term::Object(o) => Ok(o.clone()),
            Term::Var(v) => self
                .binding
                .get(v.as_str())
                .cloned()
                .ok_or_else(|| SimError::Inconsistent(format!("variable ?{v} is not bound"))),
        }
    }

    fn terms(&self, ts: &[Term]) -> Result<Vec<String>, SimError> {
        ts.iter().map(|t| self.term(t)).collect()
    }

    pub fn atom(&self, a: &Atom) -> Result<GroundAtom, SimError> {
        Ok(GroundAtom { predicate: a.predicate.clone(), args: self.terms(&a.terms)? })
    }

    pub fn fluent(&self, f: &FluentRef) -> Result<GroundFluent, SimError> {
        Ok(GroundFluent { function: f.function.clone(), args: self.terms(&f.terms)? })
    }

    pub fn expr(&self, e: &NumericExpr) -> Result<GroundExpr, SimError> {
        Ok(match e {
            NumericExpr::Const(v) => GroundExpr::Const(v.clone()),
            NumericExpr::Fluent(f) => GroundExpr::Fluent(self.fluent(f)?),
            NumericExpr::BinOp(op, l, r) => GroundExpr::BinOp(*op, Box::new(self.expr(l)?), Box::new(self.expr(r)?)),
        })
    }

    pub fn condition(&self, c: &Condition) -> Result<GroundCondition, SimError> {
        Ok(match c {
            Condition::Atom(a) => GroundCondition::Atom(self.atom(a)?),
            Condition::Equality { lhs, rhs, .. } => GroundCondition::Equality(self.term(lhs)?, self.term(rhs)?),
            Condition::Comparison { op, lhs, rhs, .. } => {
                GroundCondition::Comparison { op: *op, lhs: self.expr(lhs)?, rhs: self.expr(rhs)? }
            }
            Condition::Not(inner) => GroundCondition::Not(Box::new(self.condition(inner)?)),
            Condition::And(parts) => {
                GroundCondition::And(parts.iter().map(|p| self.condition(p)).collect::<Result<_, _>>()?)
            }
        })
    }

    pub fn effect(&self, e: &Effect) -> Result<GroundEffect, SimError> {
        let mut out = GroundEffect::default();
        for atomic in &e.effects {
            match atomic {
                AtomicEffect::Add(a) => out.adds.push(self.atom(a)?),
                AtomicEffect::Delete(a) => out.deletes.push(self.atom(a)?),
                AtomicEffect::Update { op, target, value } => {
                    out.updates.push(GroundUpdate { op: *op, target: self.fluent(target)?, value: self.expr(value)? })
                }
            }
        }
        Ok(out)
    }
}

/// Grounds one plan step: looks up the schema by (case-insensitive) name
/// and substitutes the arguments for its parameters.
pub fn ground_step(domain: &Domain, problem: &Problem, name: &str, args: &[String]) -> Result<GroundAction, SimError> {
    World::new(domain, problem).ground_step(name, args)
}

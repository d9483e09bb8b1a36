//! Condition evaluation and effect application over ground states.

use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::error::SimError;
use super::ground::{GroundCondition, GroundEffect, GroundExpr};
use super::state::State;
use crate::number::{format_rational, Rational};
use crate::pddl::{ArithOp, UpdateOp};

pub fn eval_expr(state: &State, expr: &GroundExpr) -> Result<Rational, SimError> {
    match expr {
        GroundExpr::Const(v) => Ok(v.clone()),
        GroundExpr::Fluent(f) => {
            state.value(f).cloned().ok_or_else(|| SimError::UninitializedFluent { fluent: f.to_string() })
        }
        GroundExpr::BinOp(op, l, r) => {
            let l = eval_expr(state, l)?;
            let r = eval_expr(state, r)?;
            Ok(match op {
                ArithOp::Add => l + r,
                ArithOp::Sub => l - r,
                ArithOp::Mul => l * r,
                ArithOp::Div => {
                    if r.is_zero() {
                        return Err(SimError::DivisionByZero { expr: expr.to_string() });
                    }
                    l / r
                }
            })
        }
    }
}

/// Closed-world evaluation with exact arithmetic. `And([])` is true.
pub fn eval_condition(state: &State, cond: &GroundCondition) -> Result<bool, SimError> {
    match cond {
        GroundCondition::Atom(a) => Ok(state.holds(a)),
        GroundCondition::Equality(l, r) => Ok(l == r),
        GroundCondition::Comparison { op, lhs, rhs } => {
            let l = eval_expr(state, lhs)?;
            let r = eval_expr(state, rhs)?;
            Ok(op.holds(&l, &r))
        }
        GroundCondition::Not(inner) => Ok(!eval_condition(state, inner)?),
        GroundCondition::And(parts) => {
            for p in parts {
                if !eval_condition(state, p)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Why a condition did not hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detail {
    /// A positive atom is missing from the state.
    Absent,
    /// A negated atom is present in the state.
    Present,
    /// An equality (or its negation) between two object names failed.
    Equality { lhs: String, rhs: String },
    /// A numeric comparison was false; both sides as evaluated.
    Comparison { lhs: Rational, rhs: Rational },
    /// Evaluation itself failed.
    Error(SimError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsatisfiedCondition {
    pub condition: GroundCondition,
    pub detail: Detail,
}

impl UnsatisfiedCondition {
    pub fn describe(&self) -> String {
        match &self.detail {
            Detail::Absent => format!("{} is false", self.condition),
            Detail::Present => format!("{} is false because the atom holds", self.condition),
            Detail::Equality { lhs, rhs } => format!("{} is false ({lhs} vs {rhs})", self.condition),
            Detail::Comparison { lhs, rhs } => format!(
                "{} is false (left side = {}, right side = {})",
                self.condition,
                format_rational(lhs),
                format_rational(rhs)
            ),
            Detail::Error(e) => format!("{} could not be evaluated: {e}", self.condition),
        }
    }
}

impl Serialize for UnsatisfiedCondition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let detail = match &self.detail {
            Detail::Absent => serde_json::json!({"kind": "absent"}),
            Detail::Present => serde_json::json!({"kind": "present"}),
            Detail::Equality { lhs, rhs } => serde_json::json!({"kind": "equality", "lhs": lhs, "rhs": rhs}),
            Detail::Comparison { lhs, rhs } => serde_json::json!({
                "kind": "comparison",
                "lhs": format_rational(lhs),
                "rhs": format_rational(rhs),
            }),
            Detail::Error(e) => serde_json::json!({"kind": "error", "code": e.code(), "message": e.to_string()}),
        };
        let mut s = serializer.serialize_struct("UnsatisfiedCondition", 2)?;
        s.serialize_field("condition", &self.condition.to_string())?;
        s.serialize_field("detail", &detail)?;
        s.end()
    }
}

fn explain(state: &State, cond: &GroundCondition) -> Option<Detail> {
    match eval_condition(state, cond) {
        Ok(true) => None,
        Err(e) => Some(Detail::Error(e)),
        Ok(false) => Some(match cond {
            GroundCondition::Atom(_) => Detail::Absent,
            GroundCondition::Not(inner) => match inner.as_ref() {
                GroundCondition::Equality(l, r) => Detail::Equality { lhs: l.clone(), rhs: r.clone() },
                _ => Detail::Present,
            },
            GroundCondition::Equality(l, r) => Detail::Equality { lhs: l.clone(), rhs: r.clone() },
            GroundCondition::Comparison { lhs, rhs, .. } => {
                Detail::Comparison { lhs: eval_expr(state, lhs).ok()?, rhs: eval_expr(state, rhs).ok()? }
            }
            GroundCondition::And(_) => return None,
        }),
    }
}

/// Every conjunct of `cond` that is false or fails to evaluate in `state`.
pub fn unsatisfied(state: &State, cond: &GroundCondition) -> Vec<UnsatisfiedCondition> {
    cond.conjuncts()
        .into_iter()
        .filter_map(|c| explain(state, c).map(|detail| UnsatisfiedCondition { condition: c.clone(), detail }))
        .collect()
}

/// Applies a ground effect.
///
/// Atoms: `(atoms \ deletes) ∪ adds`, so an atom both added and deleted by
/// the same action ends up true. Numeric updates: every right-hand side is
/// evaluated against the state before the action; updates to the same
/// fluent then accumulate in effect order.
pub fn apply_effect(state: &State, effect: &GroundEffect) -> Result<State, SimError> {
    let mut values = Vec::with_capacity(effect.updates.len());
    for u in &effect.updates {
        values.push(eval_expr(state, &u.value)?);
    }
    let mut next = state.clone();
    for d in &effect.deletes {
        next.atoms.remove(d);
    }
    for a in &effect.adds {
        next.atoms.insert(a.clone());
    }
    for (u, rhs) in effect.updates.iter().zip(values) {
        let new_value = if u.op == UpdateOp::Assign {
            rhs
        } else {
            let current = next
                .fluents
                .get(&u.target)
                .cloned()
                .ok_or_else(|| SimError::UninitializedFluent { fluent: u.target.to_string() })?;
            match u.op {
                UpdateOp::Increase => current + rhs,
                UpdateOp::Decrease => current - rhs,
                UpdateOp::ScaleUp => current * rhs,
                UpdateOp::ScaleDown => {
                    if rhs.is_zero() {
                        return Err(SimError::DivisionByZero {
                            expr: format!("(scale-down {} {})", u.target, u.value),
                        });
                    }
                    current / rhs
                }
                UpdateOp::Assign => unreachable!(),
            }
        };
        next.fluents.insert(u.target.clone(), new_value);
    }
    Ok(next)
}

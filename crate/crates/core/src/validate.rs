//! Plan validation with failure explanations and schema-level fix
//! suggestions.
//!
//! Suggestions name action *schemas* that could help (for example the
//! schemas whose effects add a missing atom); they never synthesize ground
//! actions or repaired plans.

use std::fmt::Write;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::check::{check_domain, check_problem};
use crate::diagnostic::Diagnostic;
use crate::number::{format_rational, Rational};
use crate::pddl::{CmpOp, Domain, Plan, Problem, UpdateOp};
use crate::sim::{
    simulate, unsatisfied, Detail, GroundCondition, GroundFluent, Outcome, SimError, Trace, UnsatisfiedCondition, World,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("the domain or problem is inconsistent ({} error(s))", .0.iter().filter(|d| d.is_error()).count())]
    InvalidInput(Vec<Diagnostic>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFailure {
    pub step: usize,
    /// The plan step as written, e.g. `(stack a b)`.
    pub action: String,
    pub unsatisfied: Vec<UnsatisfiedCondition>,
    pub error: Option<SimError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuggestionKind {
    AchieverActions,
    RemoveStep,
    GoalGap,
}

impl SuggestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SuggestionKind::AchieverActions => "achiever-actions",
            SuggestionKind::RemoveStep => "remove-step",
            SuggestionKind::GoalGap => "goal-gap",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suggestion {
    pub kind: SuggestionKind,
    /// The condition, atom or fluent the suggestion is about.
    pub target: String,
    /// Achiever schema names (achiever-actions only).
    pub schemas: Vec<String>,
    /// Plan step to reconsider (remove-step only).
    pub step: Option<usize>,
    pub message: String,
}

impl Serialize for Suggestion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Suggestion", 5)?;
        s.serialize_field("kind", self.kind.as_str())?;
        s.serialize_field("target", &self.target)?;
        s.serialize_field("schemas", &self.schemas)?;
        s.serialize_field("step", &self.step)?;
        s.serialize_field("message", &self.message)?;
        s.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub failure: Option<StepFailure>,
    pub goal_failure: Option<Vec<UnsatisfiedCondition>>,
    pub suggestions: Vec<Suggestion>,
    pub metric_value: Option<Rational>,
    /// Non-fatal findings from the domain and problem checks.
    pub warnings: Vec<Diagnostic>,
    pub trace: Trace,
}

/// JSON: `{valid, failure: null | {step, action, unsatisfied, error},
/// goal_failure: null | [...], suggestions: [...], metric_value, warnings,
/// trace}`.
impl Serialize for ValidationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let failure = self.failure.as_ref().map(|f| {
            serde_json::json!({
                "step": f.step,
                "action": f.action,
                "unsatisfied": f.unsatisfied,
                "error": f.error,
            })
        });
        let mut s = serializer.serialize_struct("ValidationReport", 7)?;
        s.serialize_field("valid", &self.valid)?;
        s.serialize_field("failure", &failure)?;
        s.serialize_field("goal_failure", &self.goal_failure)?;
        s.serialize_field("suggestions", &self.suggestions)?;
        s.serialize_field("metric_value", &self.metric_value.as_ref().map(format_rational))?;
        s.serialize_field("warnings", &self.warnings)?;
        s.serialize_field("trace", &self.trace)?;
        s.end()
    }
}

impl ValidationReport {
    /// Human-readable verdict. The first line starts with `VALID` or
    /// `INVALID`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let steps = self.trace.applied.len();
        if self.valid {
            let _ = write!(out, "VALID: the {steps}-step plan is executable and achieves the goal");
            if let Some(m) = &self.metric_value {
                let _ = write!(out, " (metric value {})", format_rational(m));
            }
            out.push('\n');
        } else if let Some(f) = &self.failure {
            let _ = writeln!(out, "INVALID: step {} {} cannot be applied", f.step, f.action);
            if let Some(e) = &f.error {
                let _ = writeln!(out, "  reason: {e}");
            }
            for u in &f.unsatisfied {
                let _ = writeln!(out, "  unsatisfied precondition: {}", u.describe());
            }
        } else {
            let _ = writeln!(out, "INVALID: all {steps} steps apply but the goal is not achieved");
            for u in self.goal_failure.iter().flatten() {
                let _ = writeln!(out, "  unsatisfied goal: {}", u.describe());
            }
        }
        for s in &self.suggestions {
            let _ = writeln!(out, "  suggestion: {}", s.message);
        }
        out
    }
}

/// Validates `plan` against `domain` and `problem`.
///
/// The domain and problem are checked first; inconsistent inputs are
/// rejected with their diagnostics rather than simulated.
pub fn validate_plan(domain: &Domain, problem: &Problem, plan: &Plan) -> Result<ValidationReport, ValidateError> {
    let mut diagnostics = check_domain(domain).diagnostics;
    diagnostics.extend(check_problem(domain, problem).diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(ValidateError::InvalidInput(diagnostics));
    }

    let trace = simulate(domain, problem, plan);
    let world = World::new(domain, problem);
    let mut suggestions = Vec::new();
    let mut failure = None;
    let mut goal_failure = None;

    match &trace.outcome {
        Outcome::Failed { step, unsatisfied, error } => {
            for u in unsatisfied {
                suggest_for(domain, &trace, u, &mut suggestions);
            }
            failure = Some(StepFailure {
                step: *step,
                action: plan.steps[*step].to_string(),
                unsatisfied: unsatisfied.clone(),
                error: error.clone(),
            });
        }
        Outcome::Completed if !trace.goal_satisfied => {
            let missing = match world.ground_goal() {
                Ok(goal) => unsatisfied(trace.final_state(), &goal),
                Err(e) => {
                    vec![UnsatisfiedCondition { condition: GroundCondition::And(Vec::new()), detail: Detail::Error(e) }]
                }
            };
            for u in &missing {
                suggestions.push(Suggestion {
                    kind: SuggestionKind::GoalGap,
                    target: u.condition.to_string(),
                    schemas: Vec::new(),
                    step: None,
                    message: format!("goal conjunct not achieved: {}", u.describe()),
                });
                suggest_for(domain, &trace, u, &mut suggestions);
            }
            goal_failure = Some(missing);
        }
        Outcome::Completed => {}
    }

    Ok(ValidationReport {
        valid: failure.is_none() && goal_failure.is_none(),
        failure,
        goal_failure,
        suggestions,
        metric_value: trace.metric_value.clone(),
        warnings: diagnostics,
        trace,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    Up,
    Down,
    Either,
}

fn moves(op: UpdateOp, wanted: Direction) -> bool {
    matches!(
        (op, wanted),
        (UpdateOp::Assign, _)
            | (_, Direction::Either)
            | (UpdateOp::Increase | UpdateOp::ScaleUp, Direction::Up)
            | (UpdateOp::Decrease | UpdateOp::ScaleDown, Direction::Down)
    )
}

fn suggest_for(domain: &Domain, trace: &Trace, u: &UnsatisfiedCondition, out: &mut Vec<Suggestion>) {
    match (&u.condition, &u.detail) {
        (GroundCondition::Atom(atom), Detail::Absent) => {
            let schemas: Vec<String> = domain
                .actions
                .iter()
                .filter(|a| {
                    a.effect.adds().any(|add| add.predicate == atom.predicate && add.terms.len() == atom.args.len())
                })
                .map(|a| a.name.clone())
                .collect();
            if !schemas.is_empty() {
                out.push(Suggestion {
                    kind: SuggestionKind::AchieverActions,
                    target: atom.to_string(),
                    message: format!("{atom} can be added by: {}", schemas.join(", ")),
                    schemas,
                    step: None,
                });
            }
        }
        (GroundCondition::Not(inner), Detail::Present) => {
            let GroundCondition::Atom(atom) = inner.as_ref() else {
                return;
            };
            let culprit = trace.applied.iter().rev().find(|a| a.action.effect.adds.contains(atom));
            if let Some(applied) = culprit {
                out.push(Suggestion {
                    kind: SuggestionKind::RemoveStep,
                    target: u.condition.to_string(),
                    schemas: Vec::new(),
                    step: Some(applied.step),
                    message: format!(
                        "step {} {} made {atom} true; consider removing or reordering it",
                        applied.step, applied.action
                    ),
                });
            }
        }
        (GroundCondition::Comparison { op, lhs, rhs }, _) => {
            let (lhs_dir, rhs_dir) = match op {
                CmpOp::Lt | CmpOp::Le => (Direction::Down, Direction::Up),
                CmpOp::Gt | CmpOp::Ge => (Direction::Up, Direction::Down),
                CmpOp::Eq => (Direction::Either, Direction::Either),
            };
            let wanted: Vec<(&GroundFluent, Direction)> = lhs
                .fluents()
                .into_iter()
                .map(|f| (f, lhs_dir))
                .chain(rhs.fluents().into_iter().map(|f| (f, rhs_dir)))
                .collect();
            for (fluent, dir) in wanted {
                let schemas: Vec<String> = domain
                    .actions
                    .iter()
                    .filter(|a| {
                        a.effect.updates().any(|(op, target, _)| target.function == fluent.function && moves(op, dir))
                    })
                    .map(|a| a.name.clone())
                    .collect();
                if schemas.is_empty() {
                    continue;
                }
                let direction = match dir {
                    Direction::Up => "increase",
                    Direction::Down => "decrease",
                    Direction::Either => "change",
                };
                out.push(Suggestion {
                    kind: SuggestionKind::AchieverActions,
                    target: fluent.to_string(),
                    message: format!("{fluent} can {direction} via: {}", schemas.join(", ")),
                    schemas,
                    step: None,
                });
            }
        }
        _ => {}
    }
}

/// True when the validator's verdict matches the simulator's
/// (completed and goal satisfied).
pub fn validate_agreement_check(domain: &Domain, problem: &Problem, plan: &Plan) -> bool {
    let trace = simulate(domain, problem, plan);
    let simulated = trace.is_completed() && trace.goal_satisfied;
    let validated = validate_plan(domain, problem, plan).map(|r| r.valid).unwrap_or(false);
    validated == simulated
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_plan, parse_problem};

    const DOMAIN: &str = "(define (domain bw) (:requirements :strips :negative-preconditions)
        (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x) (painted ?x))
        (:action pick-up :parameters (?x)
          :precondition (and (clear ?x) (ontable ?x) (handempty))
          :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
        (:action put-down :parameters (?x)
          :precondition (holding ?x)
          :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
        (:action paint :parameters (?x)
          :precondition (and (clear ?x) (not (painted ?x)))
          :effect (painted ?x))
        (:action stack :parameters (?x ?y)
          :precondition (and (holding ?x) (clear ?y))
          :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y))))";
    const PROBLEM: &str = "(define (problem p) (:domain bw) (:objects a b c)
        (:init (clear a) (clear b) (clear c) (ontable a) (ontable b) (ontable c) (handempty))
        (:goal (and (on a b) (on b c))))";

    fn report(problem: &str, plan: &str) -> ValidationReport {
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem(problem).unwrap().ast;
        validate_plan(&d, &p, &parse_plan(plan).unwrap().ast).unwrap()
    }

    #[test]
    fn empty_plan_goal_in_init() {
        let r = report("(define (problem p) (:domain bw) (:objects a) (:init (clear a)) (:goal (clear a)))", "");
        assert!(r.valid);
        assert!(r.to_text().starts_with("VALID"));
    }

    #[test]
    fn valid_plan() {
        let r = report(PROBLEM, "(pick-up b)\n(stack b c)\n(pick-up a)\n(stack a b)");
        assert!(r.valid);
        assert!(r.failure.is_none() && r.goal_failure.is_none());
        assert!(r.suggestions.is_empty());
        assert!(r.trace.is_completed() && r.trace.goal_satisfied);
    }

    #[test]
    fn step_failure_has_single_achiever() {
        // (holding a) is only added by pick-up.
        let r = report(PROBLEM, "(stack a b)");
        assert!(!r.valid);
        let f = r.failure.as_ref().unwrap();
        assert_eq!(f.step, 0);
        assert_eq!(f.action, "(stack a b)");
        assert_eq!(f.unsatisfied.len(), 1);
        assert_eq!(r.suggestions.len(), 1);
        assert_eq!(r.suggestions[0].kind, SuggestionKind::AchieverActions);
        assert_eq!(r.suggestions[0].schemas, vec!["pick-up"]);
        assert!(r.to_text().starts_with("INVALID: step 0 (stack a b)"));
    }

    #[test]
    fn negative_literal_suggests_removing_the_adder() {
        let r = report(PROBLEM, "(paint a)\n(pick-up b)\n(put-down b)\n(paint a)");
        let f = r.failure.as_ref().unwrap();
        assert_eq!(f.step, 3);
        let rm: Vec<_> = r.suggestions.iter().filter(|s| s.kind == SuggestionKind::RemoveStep).collect();
        assert_eq!(rm.len(), 1);
        assert_eq!(rm[0].step, Some(0));
    }

    #[test]
    fn goal_gap_lists_exactly_the_unmet_conjunct() {
        let r = report(PROBLEM, "(pick-up b)\n(stack b c)");
        assert!(!r.valid);
        assert!(r.failure.is_none());
        let gaps = r.goal_failure.as_ref().unwrap();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].condition.to_string(), "(on a b)");
        assert!(r.suggestions.iter().any(|s| s.kind == SuggestionKind::GoalGap && s.target == "(on a b)"));
        assert!(r.suggestions.iter().any(|s| s.schemas == vec!["stack"]));
    }

    #[test]
    fn inconsistent_inputs_are_rejected() {
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem("(define (problem p) (:domain bw) (:objects a) (:init) (:goal (on a zz)))").unwrap().ast;
        let e = validate_plan(&d, &p, &Plan::default()).unwrap_err();
        let ValidateError::InvalidInput(diags) = e;
        assert!(diags.iter().any(|d| d.code == crate::diagnostic::Code::UndeclaredObject));
    }

    #[test]
    fn numeric_direction_suggestions() {
        let d = parse_domain(
            "(define (domain c) (:requirements :numeric-fluents) (:functions (v) (cap))
              (:action up :parameters () :effect (increase (v) 1))
              (:action down :parameters () :effect (decrease (v) 1))
              (:action use :parameters () :precondition (>= (v) 2) :effect (assign (v) 0)))",
        )
        .unwrap()
        .ast;
        let p = parse_problem("(define (problem p) (:domain c) (:init (= (v) 0) (= (cap) 3)) (:goal (>= (v) 1)))")
            .unwrap()
            .ast;
        let r = validate_plan(&d, &p, &parse_plan("(use)").unwrap().ast).unwrap();
        assert_eq!(r.suggestions.len(), 1);
        assert_eq!(r.suggestions[0].schemas, vec!["up", "use"]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["failure"]["unsatisfied"][0]["detail"]["lhs"], "0");
    }

    #[test]
    fn agreement() {
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem(PROBLEM).unwrap().ast;
        for plan in ["", "(stack a b)", "(pick-up b)\n(stack b c)\n(pick-up a)\n(stack a b)", "(pick-up a)"] {
            assert!(validate_agreement_check(&d, &p, &parse_plan(plan).unwrap().ast));
        }
    }
}

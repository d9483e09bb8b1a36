use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::error::SimError;
use super::eval::{apply_effect, eval_condition, eval_expr, unsatisfied, UnsatisfiedCondition};
use super::ground::{GroundAction, Grounder, World};
use super::state::State;
use crate::number::{format_rational, Rational};
use crate::pddl::{Domain, Plan, Problem};

/// Cooperative cancellation flag, checked once per simulated step.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        CancelToken::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppliedStep {
    /// 0-based index of the step in the plan.
    pub step: usize,
    pub action: GroundAction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    /// Step `step` (0-based) could not be applied. `unsatisfied` lists the
    /// precondition conjuncts that were false or failed to evaluate; `error`
    /// is set when grounding or effect application failed instead.
    Failed {
        step: usize,
        unsatisfied: Vec<UnsatisfiedCondition>,
        error: Option<SimError>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// `states[0]` is the initial state; `states[i + 1]` follows step `i`.
    pub states: Vec<State>,
    pub applied: Vec<AppliedStep>,
    pub outcome: Outcome,
    pub goal_satisfied: bool,
    pub metric_value: Option<Rational>,
    /// Set when the goal or metric could not be evaluated on the final state.
    pub evaluation_error: Option<SimError>,
}

impl Trace {
    pub fn is_completed(&self) -> bool {
        self.outcome == Outcome::Completed
    }

    pub fn final_state(&self) -> &State {
        self.states.last().expect("a trace always holds the initial state")
    }

    /// State at index `i`, counting the initial state as index 0.
    pub fn state_at(&self, i: usize) -> Result<&State, SimError> {
        self.states.get(i).ok_or_else(|| SimError::out_of_range("state", i, self.states.len()))
    }

    /// The `i`-th applied action (0-based).
    pub fn action_at(&self, i: usize) -> Result<&GroundAction, SimError> {
        self.applied.get(i).map(|a| &a.action).ok_or_else(|| SimError::out_of_range("action", i, self.applied.len()))
    }
}

pub fn state_at(trace: &Trace, i: usize) -> Result<&State, SimError> {
    trace.state_at(i)
}

pub fn action_at(trace: &Trace, i: usize) -> Result<&GroundAction, SimError> {
    trace.action_at(i)
}

/// Initial state: the problem's init atoms and fluent assignments.
/// Domain constants only matter for the object universe, not the state.
pub fn initial_state(_domain: &Domain, problem: &Problem) -> State {
    let g = Grounder { binding: &Default::default() };
    let mut state = State::default();
    for a in &problem.init.atoms {
        if let Ok(atom) = g.atom(a) {
            state.atoms.insert(atom);
        }
    }
    for (f, v) in &problem.init.fluents {
        if let Ok(fluent) = g.fluent(f) {
            state.fluents.insert(fluent, v.clone());
        }
    }
    state
}

pub fn simulate(domain: &Domain, problem: &Problem, plan: &Plan) -> Trace {
    simulate_with_cancel(domain, problem, plan, &CancelToken::new()).expect("token is never cancelled")
}

/// Runs the plan step by step, stopping at the first inapplicable step.
pub fn simulate_with_cancel(
    domain: &Domain,
    problem: &Problem,
    plan: &Plan,
    cancel: &CancelToken,
) -> Result<Trace, SimError> {
    let world = World::new(domain, problem);
    let mut states = vec![initial_state(domain, problem)];
    let mut applied = Vec::new();

    for (i, step) in plan.steps.iter().enumerate() {
        if cancel.is_cancelled() {
            return Err(SimError::Cancelled);
        }
        let current = states.last().expect("non-empty");
        let failed = |unsatisfied, error| Outcome::Failed { step: i, unsatisfied, error };
        let action = match world.ground_step(&step.name, &step.args) {
            Ok(a) => a,
            Err(e) => return Ok(finish(&world, states, applied, failed(Vec::new(), Some(e)))),
        };
        let missing = match eval_condition(current, &action.precondition) {
            Ok(true) => Vec::new(),
            _ => unsatisfied(current, &action.precondition),
        };
        if !missing.is_empty() {
            return Ok(finish(&world, states, applied, failed(missing, None)));
        }
        match apply_effect(current, &action.effect) {
            Ok(next) => states.push(next),
            Err(e) => return Ok(finish(&world, states, applied, failed(Vec::new(), Some(e)))),
        }
        applied.push(AppliedStep { step: i, action });
    }
    Ok(finish(&world, states, applied, Outcome::Completed))
}

fn finish(world: &World<'_>, states: Vec<State>, applied: Vec<AppliedStep>, outcome: Outcome) -> Trace {
    let mut trace =
        Trace { states, applied, outcome, goal_satisfied: false, metric_value: None, evaluation_error: None };
    if !trace.is_completed() {
        return trace;
    }
    let last = trace.final_state();
    let goal = world.ground_goal().and_then(|g| eval_condition(last, &g));
    let metric = world.ground_metric().and_then(|m| m.map(|expr| eval_expr(last, &expr)).transpose());
    match goal {
        Ok(v) => trace.goal_satisfied = v,
        Err(e) => trace.evaluation_error = Some(e),
    }
    match metric {
        Ok(v) => trace.metric_value = v,
        Err(e) => {
            trace.evaluation_error.get_or_insert(e);
        }
    }
    trace
}

/// JSON schema:
///
/// ```text
/// { "states": [State, ...],
///   "applied": [{"step": 0, "action": "(move a b)"}, ...],
///   "outcome": {"status": "completed"}
///            | {"status": "failed", "step": k, "unsatisfied": [...], "error": null | {code, message}},
///   "goal_satisfied": bool,
///   "metric_value": null | "decimal",
///   "evaluation_error": null | {code, message} }
/// ```
impl Serialize for Trace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let applied: Vec<_> =
            self.applied.iter().map(|a| serde_json::json!({"step": a.step, "action": a.action.to_string()})).collect();
        let outcome = match &self.outcome {
            Outcome::Completed => serde_json::json!({"status": "completed"}),
            Outcome::Failed { step, unsatisfied, error } => serde_json::json!({
                "status": "failed",
                "step": step,
                "unsatisfied": unsatisfied,
                "error": error,
            }),
        };
        let mut s = serializer.serialize_struct("Trace", 6)?;
        s.serialize_field("states", &self.states)?;
        s.serialize_field("applied", &applied)?;
        s.serialize_field("outcome", &outcome)?;
        s.serialize_field("goal_satisfied", &self.goal_satisfied)?;
        s.serialize_field("metric_value", &self.metric_value.as_ref().map(format_rational))?;
        s.serialize_field("evaluation_error", &self.evaluation_error)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::int;
    use crate::pddl::{parse_domain, parse_plan, parse_problem};
    use crate::sim::eval::Detail;
    use crate::sim::state::{GroundAtom, GroundFluent};

    const DOMAIN: &str = "(define (domain bw) (:requirements :strips)
        (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
        (:action pick-up :parameters (?x)
          :precondition (and (clear ?x) (ontable ?x) (handempty))
          :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
        (:action put-down :parameters (?x)
          :precondition (holding ?x)
          :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
        (:action stack :parameters (?x ?y)
          :precondition (and (holding ?x) (clear ?y))
          :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y))))";
    const PROBLEM: &str = "(define (problem p) (:domain bw) (:objects a b c)
        (:init (clear a) (clear b) (clear c) (ontable a) (ontable b) (ontable c) (handempty))
        (:goal (and (on a b))))";

    fn run(plan: &str) -> Trace {
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem(PROBLEM).unwrap().ast;
        simulate(&d, &p, &parse_plan(plan).unwrap().ast)
    }

    #[test]
    fn empty_plan_goal_in_init() {
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem("(define (problem p) (:domain bw) (:objects a) (:init (clear a)) (:goal (clear a)))")
            .unwrap()
            .ast;
        let t = simulate(&d, &p, &Plan::default());
        assert_eq!(t.states.len(), 1);
        assert!(t.is_completed());
        assert!(t.goal_satisfied);
    }

    #[test]
    fn full_plan_has_n_plus_one_states() {
        let t = run("(pick-up a)\n(stack a b)\n");
        assert!(t.is_completed());
        assert_eq!(t.states.len(), 3);
        assert_eq!(t.applied.len(), 2);
        assert!(t.goal_satisfied);
        assert!(t.final_state().holds(&GroundAtom::new("on", &["a", "b"])));
    }

    #[test]
    fn fails_when_step_one_deleted_clear() {
        // Step 0 picks up a, deleting (clear a); step 1 stacks b on a, which
        // first needs b held; pick-up c then stack c a needs (clear a).
        let t = run("(pick-up a)\n(pick-up b)");
        match &t.outcome {
            Outcome::Failed { step, unsatisfied, error } => {
                assert_eq!(*step, 1);
                assert!(error.is_none());
                let names: Vec<String> = unsatisfied.iter().map(|u| u.condition.to_string()).collect();
                assert_eq!(names, vec!["(handempty)"]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(t.states.len(), 2);
        assert_eq!(t.applied.len(), 1);
        assert!(!t.goal_satisfied);

        let t = run("(pick-up a)\n(put-down a)\n(pick-up b)\n(stack b a)\n(pick-up c)\n(stack c a)");
        match &t.outcome {
            Outcome::Failed { step, unsatisfied, .. } => {
                assert_eq!(*step, 5);
                assert_eq!(unsatisfied.len(), 1);
                assert_eq!(unsatisfied[0].condition.to_string(), "(clear a)");
                assert_eq!(unsatisfied[0].detail, Detail::Absent);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grounding_failure_is_failed_outcome() {
        let t = run("(pick-up a)\n(fly a)");
        match &t.outcome {
            Outcome::Failed { step: 1, error: Some(e), .. } => assert_eq!(e.code(), "unknown-action"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indexed_retrieval() {
        let t = run("(pick-up a)\n(stack a b)");
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem(PROBLEM).unwrap().ast;
        assert_eq!(state_at(&t, 0).unwrap(), &initial_state(&d, &p));
        assert_eq!(action_at(&t, 1).unwrap().to_string(), "(stack a b)");
        let e = action_at(&t, 2).unwrap_err();
        assert_eq!(e.code(), "index-out-of-range");
        assert!(e.to_string().contains("0..=1"));
        assert!(state_at(&t, 3).is_err());
    }

    #[test]
    fn numeric_metric_and_goal_errors() {
        let d = parse_domain(
            "(define (domain c) (:requirements :numeric-fluents) (:functions (c) (total-cost))
              (:action inc :parameters () :effect (and (increase (c) 1) (increase (total-cost) 2))))",
        )
        .unwrap()
        .ast;
        let p = parse_problem(
            "(define (problem p) (:domain c) (:init (= (c) 0) (= (total-cost) 0)) (:goal (>= (c) 2))
              (:metric minimize (total-cost)))",
        )
        .unwrap()
        .ast;
        let t = simulate(&d, &p, &parse_plan("(inc)\n(inc)\n(inc)").unwrap().ast);
        assert!(t.goal_satisfied);
        assert_eq!(t.metric_value, Some(int(6)));
        assert_eq!(t.final_state().value(&GroundFluent::new("c", &[])), Some(&int(3)));

        let p = parse_problem("(define (problem p) (:domain c) (:init (= (c) 0)) (:goal (>= (zz) 2)))").unwrap().ast;
        let t = simulate(&d, &p, &Plan::default());
        assert!(!t.goal_satisfied);
        assert_eq!(t.evaluation_error.as_ref().map(SimError::code), Some("uninitialized-fluent"));

        let t = simulate(&d, &p, &parse_plan("(inc)").unwrap().ast);
        match t.outcome {
            Outcome::Failed { step: 0, error: Some(SimError::UninitializedFluent { .. }), .. } => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cancellation() {
        let d = parse_domain(DOMAIN).unwrap().ast;
        let p = parse_problem(PROBLEM).unwrap().ast;
        let token = CancelToken::new();
        token.cancel();
        let plan = parse_plan("(pick-up a)").unwrap().ast;
        assert_eq!(simulate_with_cancel(&d, &p, &plan, &token), Err(SimError::Cancelled));
        assert!(simulate_with_cancel(&d, &p, &Plan::default(), &token).is_ok());
    }

    #[test]
    fn json_shape() {
        let t = run("(pick-up a)\n(pick-up b)");
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["states"].as_array().unwrap().len(), 2);
        assert_eq!(v["applied"][0]["action"], "(pick-up a)");
        assert_eq!(v["outcome"]["status"], "failed");
        assert_eq!(v["outcome"]["step"], 1);
        assert_eq!(v["outcome"]["unsatisfied"][0]["condition"], "(handempty)");
        assert!(v["metric_value"].is_null());
    }
}

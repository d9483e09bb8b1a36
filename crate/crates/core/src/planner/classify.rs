use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::check::is_cost_only_update;
use crate::pddl::{Domain, Problem, Requirement, TOTAL_COST};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Classical,
    Numeric,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Classical => "classical",
            PlannerKind::Numeric => "numeric",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(PlannerKind::Classical),
            "numeric" => Ok(PlannerKind::Numeric),
            other => Err(format!("unknown planner kind '{other}' (expected classical or numeric)")),
        }
    }
}

/// Decides which kind of planner a task needs from its syntax alone.
///
/// The task is numeric when any of these hold:
/// - the domain or problem requires `:fluents` or `:numeric-fluents`;
/// - an action precondition or the goal contains a numeric comparison;
/// - an effect updates a fluent other than the `(increase (total-cost) ..)` bump;
/// - the metric mentions a fluent other than `total-cost`.
///
/// Everything else, including `:action-costs` domains minimising
/// `total-cost`, is classical.
pub fn classify(domain: &Domain, problem: &Problem) -> PlannerKind {
    if is_numeric(domain, problem) {
        PlannerKind::Numeric
    } else {
        PlannerKind::Classical
    }
}

fn is_numeric(domain: &Domain, problem: &Problem) -> bool {
    let numeric_req = |r: &Requirement| matches!(r, Requirement::Fluents | Requirement::NumericFluents);
    if domain.requirements.iter().any(numeric_req) || problem.requirements.iter().any(numeric_req) {
        return true;
    }
    for action in &domain.actions {
        if action.precondition.has_comparison() {
            return true;
        }
        if action.effect.updates().any(|(op, target, _)| !is_cost_only_update(op, target)) {
            return true;
        }
    }
    if problem.goal.has_comparison() {
        return true;
    }
    problem.metric.as_ref().is_some_and(|m| m.expr.fluents().iter().any(|f| f.function != TOTAL_COST))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};

    fn kind(domain: &str, problem: &str) -> PlannerKind {
        classify(&parse_domain(domain).unwrap().ast, &parse_problem(problem).unwrap().ast)
    }

    const PROBLEM: &str = "(define (problem p) (:domain d) (:objects a) (:init (p a)) (:goal (p a)))";

    #[test]
    fn strips_is_classical() {
        let d = "(define (domain d) (:predicates (p ?x) (q ?x))
                 (:action a :parameters (?x) :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))";
        assert_eq!(kind(d, PROBLEM), PlannerKind::Classical);
    }

    #[test]
    fn counters_is_numeric() {
        let d = "(define (domain d) (:requirements :numeric-fluents) (:predicates (p ?x)) (:functions (v ?x))
                 (:action inc :parameters (?x) :precondition (< (v ?x) 10) :effect (increase (v ?x) 1)))";
        let p = "(define (problem p) (:domain d) (:objects a) (:init (= (v a) 0)) (:goal (>= (v a) 3)))";
        assert_eq!(kind(d, p), PlannerKind::Numeric);
    }

    #[test]
    fn action_costs_stay_classical() {
        let d = "(define (domain d) (:requirements :action-costs) (:predicates (p ?x) (q ?x))
                 (:functions (total-cost) - number)
                 (:action a :parameters (?x) :precondition (p ?x) :effect (and (q ?x) (increase (total-cost) 1))))";
        let p = "(define (problem p) (:domain d) (:objects a) (:init (p a) (= (total-cost) 0))
                 (:goal (q a)) (:metric minimize (total-cost)))";
        assert_eq!(kind(d, p), PlannerKind::Classical);
    }

    #[test]
    fn each_rule_branch_is_numeric() {
        let update = "(define (domain d) (:predicates (p ?x)) (:functions (v ?x))
                      (:action a :parameters (?x) :precondition (p ?x) :effect (assign (v ?x) 2)))";
        assert_eq!(kind(update, PROBLEM), PlannerKind::Numeric);

        let cmp = "(define (domain d) (:predicates (p ?x)) (:functions (v ?x))
                   (:action a :parameters (?x) :precondition (> (v ?x) 0) :effect (p ?x)))";
        assert_eq!(kind(cmp, PROBLEM), PlannerKind::Numeric);

        let req = "(define (domain d) (:requirements :fluents) (:predicates (p ?x)))";
        assert_eq!(kind(req, PROBLEM), PlannerKind::Numeric);

        let plain = "(define (domain d) (:predicates (p ?x)) (:functions (v ?x)))";
        let metric = "(define (problem p) (:domain d) (:objects a) (:init (p a) (= (v a) 1))
                      (:goal (p a)) (:metric maximize (v a)))";
        assert_eq!(kind(plain, metric), PlannerKind::Numeric);

        let goal = "(define (problem p) (:domain d) (:objects a) (:init (= (v a) 1)) (:goal (> (v a) 0)))";
        assert_eq!(kind(plain, goal), PlannerKind::Numeric);
    }

    #[test]
    fn decreasing_total_cost_is_numeric() {
        let d = "(define (domain d) (:requirements :action-costs) (:predicates (p ?x)) (:functions (total-cost))
                 (:action a :parameters (?x) :precondition (p ?x) :effect (decrease (total-cost) 1)))";
        assert_eq!(kind(d, PROBLEM), PlannerKind::Numeric);
    }

    #[test]
    fn kind_parses_case_insensitively() {
        assert_eq!("Numeric".parse::<PlannerKind>(), Ok(PlannerKind::Numeric));
        assert!("hybrid".parse::<PlannerKind>().is_err());
    }
}

//! Brute-force reference validator for STRIPS tasks: grounds every action
//! up front and replays plans over sets of atom strings. It shares only the
//! parsed AST with the library.

use std::collections::{BTreeSet, HashMap};

use pddl_copilot::pddl::{AtomicEffect, Condition, Domain, Plan, Problem, Term};

type Binding = HashMap<String, String>;

pub struct Oracle<'a> {
    domain: &'a Domain,
    /// `"(name a b)"` → (schema index, binding)
    ground: HashMap<String, (usize, Binding)>,
    init: BTreeSet<String>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    StepFails(usize),
    GoalUnmet,
}

fn resolve(term: &Term, binding: &Binding) -> String {
    match term {
        Term::Var(v) => binding[v.as_str()].clone(),
        Term::Object(o) => o.clone(),
    }
}

fn key(head: &str, args: &[String]) -> String {
    let mut s = format!("({head}");
    for a in args {
        s.push(' ');
        s.push_str(a);
    }
    s.push(')');
    s
}

fn holds(cond: &Condition, binding: &Binding, state: &BTreeSet<String>) -> bool {
    match cond {
        Condition::Atom(a) => {
            let args: Vec<String> = a.terms.iter().map(|t| resolve(t, binding)).collect();
            state.contains(&key(&a.predicate, &args))
        }
        Condition::Not(c) => !holds(c, binding, state),
        Condition::And(cs) => cs.iter().all(|c| holds(c, binding, state)),
        Condition::Equality { lhs, rhs, .. } => resolve(lhs, binding) == resolve(rhs, binding),
        Condition::Comparison { .. } => panic!("the oracle only handles STRIPS conditions"),
    }
}

impl<'a> Oracle<'a> {
    pub fn new(domain: &'a Domain, problem: &Problem) -> Self {
        let mut objects: Vec<(String, String)> =
            domain.constants.iter().chain(&problem.objects).map(|o| (o.name.clone(), o.ty.clone())).collect();
        objects.sort();
        objects.dedup();
        let is_a = |ty: &str, want: &str| {
            let mut cur = Some(ty.to_string());
            while let Some(t) = cur {
                if t == want || want == "object" {
                    return true;
                }
                cur = domain.types.parent(&t).map(str::to_string);
            }
            false
        };
        let mut ground = HashMap::new();
        for (idx, schema) in domain.actions.iter().enumerate() {
            let mut bindings: Vec<Binding> = vec![HashMap::new()];
            for p in &schema.params {
                let mut next = Vec::new();
                for b in &bindings {
                    for (name, ty) in &objects {
                        if is_a(ty, &p.ty) {
                            let mut nb = b.clone();
                            nb.insert(p.name.clone(), name.clone());
                            next.push(nb);
                        }
                    }
                }
                bindings = next;
            }
            for b in bindings {
                let args: Vec<String> = schema.params.iter().map(|p| b[&p.name].clone()).collect();
                ground.insert(key(&schema.name, &args), (idx, b));
            }
        }
        let init = problem
            .init
            .atoms
            .iter()
            .map(|a| key(&a.predicate, &a.terms.iter().map(|t| resolve(t, &HashMap::new())).collect::<Vec<_>>()))
            .collect();
        Oracle { domain, ground, init }
    }

    /// Ground action keys, sorted.
    pub fn actions(&self) -> Vec<String> {
        let mut keys: Vec<String> = self.ground.keys().cloned().collect();
        keys.sort();
        keys
    }

    pub fn initial(&self) -> BTreeSet<String> {
        self.init.clone()
    }

    pub fn applicable(&self, action: &str, state: &BTreeSet<String>) -> bool {
        self.ground.get(action).is_some_and(|(i, b)| holds(&self.domain.actions[*i].precondition, b, state))
    }

    pub fn apply(&self, action: &str, state: &BTreeSet<String>) -> BTreeSet<String> {
        let (i, b) = &self.ground[action];
        let mut next = state.clone();
        let mut adds = Vec::new();
        for e in &self.domain.actions[*i].effect.effects {
            match e {
                AtomicEffect::Delete(a) => {
                    next.remove(&key(&a.predicate, &a.terms.iter().map(|t| resolve(t, b)).collect::<Vec<_>>()));
                }
                AtomicEffect::Add(a) => {
                    adds.push(key(&a.predicate, &a.terms.iter().map(|t| resolve(t, b)).collect::<Vec<_>>()))
                }
                AtomicEffect::Update { .. } => panic!("the oracle only handles STRIPS effects"),
            }
        }
        next.extend(adds);
        next
    }

    pub fn judge(&self, problem: &Problem, plan: &Plan) -> Verdict {
        let mut state = self.initial();
        for (i, step) in plan.steps.iter().enumerate() {
            let k = key(&step.name, &step.args);
            if !self.applicable(&k, &state) {
                return Verdict::StepFails(i);
            }
            state = self.apply(&k, &state);
        }
        if holds(&problem.goal, &HashMap::new(), &state) {
            Verdict::Valid
        } else {
            Verdict::GoalUnmet
        }
    }
}

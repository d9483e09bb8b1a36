//! Frame-property checks on execution traces.

use pddl_copilot::pddl::{Domain, Problem};
use pddl_copilot::sim::{initial_state, Trace};

/// Describes every place where consecutive states differ in a way the
/// applied action's ground effect does not explain.
pub fn frame_violations(trace: &Trace) -> Vec<String> {
    let mut out = Vec::new();
    for (i, applied) in trace.applied.iter().enumerate() {
        let (before, after) = (&trace.states[i], &trace.states[i + 1]);
        let effect = &applied.action.effect;
        for atom in after.atoms.difference(&before.atoms) {
            if !effect.adds.contains(atom) {
                out.push(format!("step {i}: {atom} appeared without an add effect"));
            }
        }
        for atom in before.atoms.difference(&after.atoms) {
            if !effect.deletes.contains(atom) || effect.adds.contains(atom) {
                out.push(format!("step {i}: {atom} vanished without a delete effect"));
            }
        }
        for atom in &effect.adds {
            if !after.atoms.contains(atom) {
                out.push(format!("step {i}: added {atom} is missing"));
            }
        }
        for atom in &effect.deletes {
            if after.atoms.contains(atom) && !effect.adds.contains(atom) {
                out.push(format!("step {i}: deleted {atom} is still present"));
            }
        }
        let updated = |f| effect.updates.iter().any(|u| &u.target == f);
        for (f, v) in &after.fluents {
            if before.fluents.get(f) != Some(v) && !updated(f) {
                out.push(format!("step {i}: fluent {f} changed without an update"));
            }
        }
        for f in before.fluents.keys() {
            if !after.fluents.contains_key(f) {
                out.push(format!("step {i}: fluent {f} disappeared"));
            }
        }
    }
    out
}

/// All trace laws for a plan of `plan_len` steps that is known to execute.
pub fn law_violations(domain: &Domain, problem: &Problem, trace: &Trace, plan_len: usize) -> Vec<String> {
    let mut out = frame_violations(trace);
    if trace.states.len() != plan_len + 1 {
        out.push(format!("{} states for {plan_len} steps", trace.states.len()));
    }
    if trace.state_at(0).ok() != Some(&initial_state(domain, problem)) {
        out.push("state 0 is not the initial state".into());
    }
    out
}

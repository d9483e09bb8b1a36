mod support;

use pddl_copilot::pddl::{parse_domain, parse_plan, parse_problem, Domain};
use pddl_copilot::validate::validate_plan;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use support::oracle::{Oracle, Verdict};
use support::{blocks, corpus};

fn verdict(domain: &Domain, problem_text: &str, plan_text: &str) -> Verdict {
    let problem = parse_problem(problem_text).unwrap().ast;
    let plan = parse_plan(plan_text).unwrap().ast;
    let report = validate_plan(domain, &problem, &plan).unwrap();
    match (&report.failure, report.valid) {
        (_, true) => Verdict::Valid,
        (Some(f), false) => Verdict::StepFails(f.step),
        (None, false) => Verdict::GoalUnmet,
    }
}

/// A random step sequence that mixes applicable actions, arbitrary ground
/// actions and malformed steps.
fn random_plan(rng: &mut StdRng, oracle: &Oracle) -> String {
    let all = oracle.actions();
    let mut state = oracle.initial();
    let mut steps = Vec::new();
    for _ in 0..rng.gen_range(0..=6) {
        let roll: f64 = rng.gen();
        let applicable: Vec<&String> = all.iter().filter(|a| oracle.applicable(a, &state)).collect();
        let step = if roll < 0.65 && !applicable.is_empty() {
            applicable.choose(rng).unwrap().to_string()
        } else if roll < 0.95 {
            all.choose(rng).unwrap().clone()
        } else {
            ["(fly a)", "(stack a)", "(pick-up z)"].choose(rng).unwrap().to_string()
        };
        if oracle.applicable(&step, &state) {
            state = oracle.apply(&step, &state);
        }
        steps.push(step);
    }
    steps.join("\n")
}

#[test]
fn validator_agrees_with_brute_force_oracle() {
    let domain_text = corpus::first_task("blocksworld").domain_text();
    let domain = parse_domain(&domain_text).unwrap().ast;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut instances: Vec<String> = (1..=4).map(|n| blocks::problem(&mut rng, n, &format!("rand-{n}"))).collect();
    instances.push(blocks::problem(&mut rng, 4, "rand-4b"));
    instances.push(corpus::first_task("blocksworld").problem_text());

    let mut seen = [0usize; 3];
    for text in &instances {
        let problem = parse_problem(text).unwrap().ast;
        let oracle = Oracle::new(&domain, &problem);
        for _ in 0..100 {
            let plan_text = random_plan(&mut rng, &oracle);
            let expected = oracle.judge(&problem, &parse_plan(&plan_text).unwrap().ast);
            let got = verdict(&domain, text, &plan_text);
            assert_eq!(got, expected, "problem:\n{text}\nplan:\n{plan_text}");
            seen[match expected {
                Verdict::Valid => 0,
                Verdict::StepFails(_) => 1,
                Verdict::GoalUnmet => 2,
            }] += 1;
        }
    }
    // The sample must exercise every verdict.
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
}

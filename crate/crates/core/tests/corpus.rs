mod support;

use pddl_copilot::check::{check_domain, check_problem};
use pddl_copilot::number::{format_rational, parse_decimal};
use pddl_copilot::pddl::{parse_domain, parse_plan, parse_problem, print_domain, print_problem};
use pddl_copilot::planner::classify;
use pddl_copilot::sim::{simulate, GroundFluent};
use pddl_copilot::validate::validate_plan;
use support::corpus::{first_task, tasks, FAMILIES};

#[test]
fn every_family_is_present() {
    let all = tasks();
    assert!(all.len() >= 10);
    for (family, _) in FAMILIES {
        assert!(all.iter().any(|t| t.family == *family), "missing {family}");
    }
}

#[test]
fn round_trip_and_check() {
    for t in tasks() {
        let d = parse_domain(&t.domain_text()).unwrap().ast;
        let p = parse_problem(&t.problem_text()).unwrap().ast;
        assert_eq!(parse_domain(&print_domain(&d)).unwrap().ast, d, "{}", t.domain.display());
        assert_eq!(parse_problem(&print_problem(&p)).unwrap().ast, p, "{}", t.problem.display());
        assert!(check_domain(&d).ok, "{}", t.domain.display());
        assert!(check_problem(&d, &p).ok, "{}", t.problem.display());
    }
}

#[test]
fn printing_is_idempotent() {
    for t in tasks() {
        let once = print_domain(&parse_domain(&t.domain_text()).unwrap().ast);
        assert_eq!(print_domain(&parse_domain(&once).unwrap().ast), once);
        let once = print_problem(&parse_problem(&t.problem_text()).unwrap().ast);
        assert_eq!(print_problem(&parse_problem(&once).unwrap().ast), once);
    }
}

#[test]
fn classification_matches_family() {
    for t in tasks() {
        let d = parse_domain(&t.domain_text()).unwrap().ast;
        let p = parse_problem(&t.problem_text()).unwrap().ast;
        let expected = FAMILIES.iter().find(|(f, _)| *f == t.family).unwrap().1;
        assert_eq!(classify(&d, &p), expected, "{}", t.problem.display());
    }
}

#[test]
fn reference_plans_are_valid() {
    for t in tasks() {
        let d = parse_domain(&t.domain_text()).unwrap().ast;
        let p = parse_problem(&t.problem_text()).unwrap().ast;
        let plan = parse_plan(&t.plan_text().unwrap()).unwrap().ast;
        let report = validate_plan(&d, &p, &plan).unwrap();
        assert!(report.valid, "{}:\n{}", t.problem.display(), report.to_text());
    }
}

// Final states below were computed by hand and agree with an external
// sequential simulator.

#[test]
fn blocksworld_final_state() {
    let t = first_task("blocksworld");
    let d = parse_domain(&t.domain_text()).unwrap().ast;
    let p = parse_problem(&t.problem_text()).unwrap().ast;
    let trace = simulate(&d, &p, &parse_plan(&t.plan_text().unwrap()).unwrap().ast);
    assert_eq!(trace.final_state().to_string(), "(clear a)\n(handempty)\n(on a b)\n(on b c)\n(on c d)\n(ontable d)\n");
}

#[test]
fn numeric_final_values() {
    let value = |family: &str, fluent: GroundFluent| {
        let t = first_task(family);
        let d = parse_domain(&t.domain_text()).unwrap().ast;
        let p = parse_problem(&t.problem_text()).unwrap().ast;
        let trace = simulate(&d, &p, &parse_plan(&t.plan_text().unwrap()).unwrap().ast);
        format_rational(trace.final_state().value(&fluent).unwrap())
    };
    assert_eq!(value("counters", GroundFluent::new("value", &["c2"])), "2");
    assert_eq!(value("farmland", GroundFluent::new("x", &["farm0"])), "1");
    assert_eq!(value("sailing", GroundFluent::new("y", &["b0"])), "6");
    assert_eq!(value("sailing", GroundFluent::new("x", &["b0"])), "0");
    assert_eq!(value("depots-numeric", GroundFluent::new("current_load", &["truck0"])), "0");
    assert_eq!(value("depots-numeric", GroundFluent::new("fuel-cost", &[])), "11");
    assert_eq!(value("minecraft-pogo", GroundFluent::new("planks", &[])), "1");
    assert_eq!(value("minecraft-pogo", GroundFluent::new("sticks", &[])), "3");
}

#[test]
fn metric_values() {
    let metric = |family: &str| {
        let t = first_task(family);
        let d = parse_domain(&t.domain_text()).unwrap().ast;
        let p = parse_problem(&t.problem_text()).unwrap().ast;
        validate_plan(&d, &p, &parse_plan(&t.plan_text().unwrap()).unwrap().ast).unwrap().metric_value
    };
    assert_eq!(metric("depots-numeric"), parse_decimal("11"));
    assert_eq!(metric("farmland"), parse_decimal("1"));
    assert_eq!(metric("blocksworld"), None);
}

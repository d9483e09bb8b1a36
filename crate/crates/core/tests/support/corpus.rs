use std::fs;
use std::path::{Path, PathBuf};

use pddl_copilot::planner::PlannerKind;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[derive(Clone, Debug)]
pub struct Task {
    pub family: String,
    pub domain: PathBuf,
    pub problem: PathBuf,
    pub plan: Option<PathBuf>,
}

impl Task {
    pub fn domain_text(&self) -> String {
        fs::read_to_string(&self.domain).unwrap()
    }

    pub fn problem_text(&self) -> String {
        fs::read_to_string(&self.problem).unwrap()
    }

    pub fn plan_text(&self) -> Option<String> {
        self.plan.as_ref().map(|p| fs::read_to_string(p).unwrap())
    }
}

/// Families and the planner kind each must classify as.
pub const FAMILIES: &[(&str, PlannerKind)] = &[
    ("barman", PlannerKind::Classical),
    ("blocksworld", PlannerKind::Classical),
    ("depots", PlannerKind::Classical),
    ("rovers", PlannerKind::Classical),
    ("satellite", PlannerKind::Classical),
    ("depots-numeric", PlannerKind::Numeric),
    ("counters", PlannerKind::Numeric),
    ("farmland", PlannerKind::Numeric),
    ("sailing", PlannerKind::Numeric),
    ("minecraft-pogo", PlannerKind::Numeric),
];

/// Every problem in the corpus, sorted by family then file name.
pub fn tasks() -> Vec<Task> {
    let mut out = Vec::new();
    for (family, _) in FAMILIES {
        let dir = corpus_dir().join(family);
        let mut problems: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "pddl") && !p.ends_with("domain.pddl"))
            .collect();
        problems.sort();
        for problem in problems {
            let plan = problem.with_extension("plan");
            out.push(Task {
                family: family.to_string(),
                domain: dir.join("domain.pddl"),
                plan: plan.is_file().then_some(plan),
                problem,
            });
        }
    }
    out
}

pub fn first_task(family: &str) -> Task {
    tasks().into_iter().find(|t| t.family == family).unwrap()
}

//! Hermetic stub planners built from `sh -c` scripts. In the scripts `$1`,
//! `$2` and `$3` are the domain, problem and plan-output paths.

use std::fs;
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use pddl_copilot::planner::{OutputParser, PlannerConfig, PlannerKind, Registry};

pub fn config(name: &str, kind: PlannerKind, script: &str, parser: OutputParser, timeout: u64) -> PlannerConfig {
    PlannerConfig {
        name: name.into(),
        kind,
        command: ["sh", "-c", script, "stub", "{domain}", "{problem}", "{plan_out}"].map(String::from).to_vec(),
        output_parser: parser,
        timeout_seconds: timeout,
        working_dir: None,
    }
}

pub fn registry(configs: Vec<PlannerConfig>) -> Registry {
    Registry::new(configs).unwrap()
}

/// Shell snippet that prints `text` verbatim.
pub fn echo(text: &str) -> String {
    format!("cat <<'PLAN'\n{text}\nPLAN\n")
}

/// Writes a JSON registry file for the given planners and returns its path.
pub fn write_config(dir: &Path, configs: &[PlannerConfig]) -> std::path::PathBuf {
    let path = dir.join("planners.json");
    let doc = serde_json::json!({ "planners": configs });
    fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

/// True while `pid` names a live (non-zombie) process.
pub fn is_alive(pid: u32) -> bool {
    match fs::read_to_string(format!("/proc/{pid}/stat")) {
        // The state letter follows the parenthesised command name.
        Ok(stat) => !matches!(stat.rsplit(')').next().and_then(|s| s.trim().chars().next()), Some('Z') | Some('X')),
        Err(_) => false,
    }
}

/// Waits up to `limit` for `pid` to die.
pub fn dies_within(pid: u32, limit: Duration) -> bool {
    let start = Instant::now();
    while start.elapsed() < limit {
        if !is_alive(pid) {
            return true;
        }
        thread::sleep(Duration::from_millis(10));
    }
    !is_alive(pid)
}

/// Reads the pid a stub recorded in `<plan_out>.child`.
pub fn recorded_child(scratch: &Path) -> u32 {
    fs::read_to_string(scratch.join("plan.txt.child")).unwrap().trim().parse().unwrap()
}

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::pddl::{parse_plan_in, print_plan, Plan};

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: malformed plan ({} error(s))", diagnostics.len())]
    Parse { path: PathBuf, diagnostics: Vec<Diagnostic> },
}

/// Writes `plan` in canonical form, overwriting any existing file, and
/// returns the absolute path written.
pub fn save_plan(plan: &Plan, path: &Path) -> Result<PathBuf, PersistError> {
    let io = |e: std::io::Error| PersistError::Io { path: path.to_path_buf(), message: e.to_string() };
    let absolute = std::path::absolute(path).map_err(io)?;
    fs::write(&absolute, print_plan(plan)).map_err(io)?;
    Ok(absolute)
}

pub fn load_plan(path: &Path) -> Result<Plan, PersistError> {
    let text =
        fs::read_to_string(path).map_err(|e| PersistError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    parse_plan_in(&text, &path.display().to_string())
        .map(|p| p.ast)
        .map_err(|diagnostics| PersistError::Parse { path: path.to_path_buf(), diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse_plan;

    #[test]
    fn save_load_round_trip_and_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.plan");
        let plan = parse_plan("(pick-up a)\n0.5: (STACK a b) [1]\n").unwrap().ast;
        let written = save_plan(&plan, &path).unwrap();
        assert!(written.is_absolute());
        assert_eq!(load_plan(&written).unwrap(), plan);

        let other = parse_plan("(noop)").unwrap().ast;
        assert_eq!(save_plan(&other, &path).unwrap(), written);
        assert_eq!(load_plan(&path).unwrap(), other);
        assert_eq!(fs::read_to_string(&path).unwrap(), "(noop)\n");
    }

    #[test]
    fn malformed_line_reports_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.plan");
        fs::write(&path, "(a)\n(b\n").unwrap();
        match load_plan(&path) {
            Err(PersistError::Parse { diagnostics, .. }) => assert!(diagnostics[0].message.contains("line 2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unwritable_destination_names_the_path() {
        let plan = Plan::default();
        let err = save_plan(&plan, Path::new("/nonexistent-dir/x.plan")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.plan"));
    }
}

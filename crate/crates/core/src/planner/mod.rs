//! Planner selection and execution: syntactic classification of tasks as
//! classical or numeric, a JSON planner registry, subprocess execution with
//! a timeout that kills the whole process group, output parsing, automatic
//! validation and plan persistence.

mod classify;
mod config;
mod exec;
mod output;
mod persist;

pub use classify::{classify, PlannerKind};
pub use config::{ConfigError, OutputParser, PlannerConfig, Registry, CONFIG_ENV};
pub use exec::{load_task, solve, PlannerError, SolveResult};
pub use output::{parse_planner_output, NoPlanFound};
pub use persist::{load_plan, save_plan, PersistError};

//! Plan simulation: per-step lazy grounding, closed-world condition
//! evaluation with exact arithmetic, effect application and execution
//! traces with indexed state/action retrieval.
//!
//! Indexing is 0-based throughout: state 0 is the initial state, state
//! `i + 1` is the state after action `i`.

mod error;
mod eval;
mod ground;
mod state;
mod trace;

pub use error::SimError;
pub use eval::{apply_effect, eval_condition, eval_expr, unsatisfied, Detail, UnsatisfiedCondition};
pub use ground::{ground_step, GroundAction, GroundCondition, GroundEffect, GroundExpr, GroundUpdate, World};
pub use state::{GroundAtom, GroundFluent, State};
pub use trace::{
    action_at, initial_state, simulate, simulate_with_cancel, state_at, AppliedStep, CancelToken, Outcome, Trace,
};

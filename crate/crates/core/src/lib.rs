pub mod check;
pub mod diagnostic;
pub mod mcp;
pub mod number;
pub mod pddl;
pub mod planner;
pub mod sim;
pub mod tools;
pub mod validate;

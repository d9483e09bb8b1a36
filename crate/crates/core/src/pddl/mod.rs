//! PDDL front end: lexer, s-expression reader, domain/problem/plan parsers
//! and the canonical printer.

pub mod ast;
pub mod lexer;
mod parser;
mod plan;
mod printer;
pub mod sexpr;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_domain, parse_domain_in, parse_problem, parse_problem_in, ParseResult, Parsed};
pub use plan::{parse_plan, parse_plan_in};
pub use printer::{print_domain, print_plan, print_problem};

//! Helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod blocks;
pub mod corpus;
pub mod laws;
pub mod oracle;
pub mod stub;

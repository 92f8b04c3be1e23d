//! Scenario files, built-in templates, random generators, reports and the
//! `qdt` command line for the decision calculus in [`qdt_core`].

pub mod builtin;
pub mod cli;
mod error;
pub mod format;
pub mod random;
pub mod report;

pub use builtin::{builtin_scenario, builtin_with, BuiltinParams};
pub use error::{Result, ScenarioError};
pub use format::{parse_scenario, Scenario, ScenarioOptions};
pub use random::{random_scenario, random_strict_scenario, MatrixKind};
pub use report::{analyze, Analysis, DecisionReport, Format};

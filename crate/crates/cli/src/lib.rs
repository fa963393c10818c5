//! Library surface behind the `matrig` binary: formula evaluators,
//! experiment output plumbing, and input resolution. Kept as a library so
//! the acceptance suite can drive the same code paths the CLI uses.

pub mod experiment;
pub mod formulas;
pub mod inputs;

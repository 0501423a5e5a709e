//! Command-line front end: JSON problem files, identification runs,
//! simulated elicitation, axiom verdicts, demos and CSV robustness sweeps.

pub mod commands;
pub mod schema;
pub mod sweep;

//! Scenario files, report documents and the command runner behind `linstab`.

pub mod report;
pub mod run;
pub mod scenario;

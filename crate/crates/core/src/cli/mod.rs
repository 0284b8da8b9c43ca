//! Config-driven experiment runner: config grammar, task execution,
//! result serialization, and named verification suites.

pub mod config;
pub mod report;
pub mod tasks;
pub mod verify;

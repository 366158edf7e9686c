//! Run driver for the multi-time solver: configuration, subcommands and
//! deterministic reports.

pub mod commands;
pub mod config;
pub mod oracle;
pub mod report;
pub mod selftest;

//! Command-line front end and experiment drivers.

pub mod args;
pub mod commands;
pub mod experiments;
pub mod output;

pub use commands::run;

//! Library side of the guesswork command-line tool: configuration
//! loading, figure dataset builders, the built-in verification fixtures
//! and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod verify;

pub use error::CliError;

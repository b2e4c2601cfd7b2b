//! The `strnim` command-line tool and HTTP service.

pub mod commands;
pub mod engine;
pub mod play;
pub mod server;

pub use commands::{run, Cli, ExitCode};

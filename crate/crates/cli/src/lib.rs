//! Session language and command-line front end for the `defk` engine.

pub mod commands;
pub mod render;
pub mod session;
pub mod syntax;

pub use commands::{run_command, Command, Output};
pub use session::{Diagnostic, Env};
pub use syntax::{parse_session, Session};

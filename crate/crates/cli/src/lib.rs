//! Library half of the `btkit` command-line tool: input parsing and report
//! rendering, kept separate from argument handling so it can be tested directly.

pub mod app;
pub mod io;

pub use app::{run, Command, Format, RunConfig, RunError};

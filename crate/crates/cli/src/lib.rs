//! Library half of the `boxpress` command-line tool: file formats, OBJ
//! export and the subcommand implementations.

pub mod commands;
pub mod format;
pub mod obj;

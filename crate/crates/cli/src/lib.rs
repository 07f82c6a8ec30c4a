//! Command-line front end for `molshape`.
//!
//! Each command returns a [`report::RunReport`], the JSON document the
//! `molshape` binary prints. Input problems are [`commands::InputError`]s
//! and map to exit code 2. Failed checks inside a report map to exit
//! code 1.

pub mod builtin;
pub mod commands;
pub mod report;
pub mod verify;

pub use commands::{cmd_minimize, cmd_modes, cmd_symmetry, InputError, RunOptions, SpecInput};
pub use report::{Check, RunReport};
pub use verify::cmd_verify_paper;

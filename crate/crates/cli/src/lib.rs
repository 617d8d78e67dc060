//! File formats and subcommands behind the `rentdiv` binary.

pub mod commands;
pub mod examples;
pub mod files;

pub use commands::{
    cmd_oracle, cmd_report, cmd_solve, cmd_solve_dir, cmd_verify, CommandOutput, EXIT_ERROR, EXIT_INFEASIBLE,
    EXIT_SOLVED, EXIT_VERIFY_FAILED,
};
pub use files::{parse_instance, parse_result, FileError, NamedInstance};

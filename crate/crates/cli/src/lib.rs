//! Library side of the `shift2iet` command: config parsing and subcommands.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, Overrides, RunConfig, Source};
pub use run::{run, Command, Outcome, RunError, Status};

/// Exit code for malformed input, unknown fixtures and precondition errors.
pub const EXIT_INPUT: i32 = 2;

/// Worker count from `SHIFT2IET_THREADS`; `None` when unset.
pub fn thread_limit(var: Option<&str>) -> Result<Option<usize>, String> {
    match var {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("SHIFT2IET_THREADS must be a positive integer, got {v:?}")),
        },
    }
}

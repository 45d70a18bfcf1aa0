//! Batch front end: run configurations, the `kernel`, `solve` and `verify`
//! commands, and the checks they report.

pub mod check;
pub mod config;
pub mod kernel_cmd;
pub mod oracle;
pub mod solve;
pub mod verify;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A verification or run invariant failed.
    pub const FAILED: i32 = 1;
    /// Bad flags, configuration or parameters.
    pub const USAGE: i32 = 2;
    /// A numerical routine failed.
    pub const NUMERICAL: i32 = 3;
    /// The critical threshold is not met by any trial profile.
    pub const THRESHOLD: i32 = 4;
}

//! Exit-code classification.
//!
//! Commands return `anyhow::Error`; marker errors anywhere in the chain
//! pick the exit code. Everything unmarked is a data error.

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

/// Bad invocation: missing seed, missing or nonexistent input, bad config.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// The run finished but at least one acceptance check failed.
#[derive(Debug, Error)]
#[error("acceptance checks failed: {0}")]
pub struct AcceptanceFailure(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        EXIT_USAGE
    } else if err.chain().any(|e| e.is::<AcceptanceFailure>()) {
        EXIT_ACCEPTANCE
    } else {
        EXIT_DATA
    }
}

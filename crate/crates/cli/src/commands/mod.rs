pub mod check_potential;
pub mod counterexample;
pub mod radial_cmd;
pub mod solve;
pub mod verify_embedding;

use serde::Serialize;

/// Outcome of a subcommand: reports were written either way; `failures`
/// lists every check that did not come out as expected, and drives the
/// nonzero exit code.
#[derive(Debug, Default, Serialize)]
pub struct CommandStatus {
    pub failures: Vec<String>,
}

impl CommandStatus {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, reason: impl Into<String>) {
        self.failures.push(reason.into());
    }
}

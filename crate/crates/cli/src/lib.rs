//! Seeded experiment runner for the `ucc-synth` library.

pub mod manifest;
pub mod plot;
pub mod run;
pub mod spec;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const PARTIAL: u8 = 3;
}

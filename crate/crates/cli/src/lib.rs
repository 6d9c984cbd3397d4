//! Config-driven experiment runner for the Möbius disjointness lab.
//!
//! The library half exists so integration tests can drive runs in-process
//! (and compare artifacts across worker counts); the binary in `main.rs`
//! is a thin command-line layer over it.

pub mod checks;
pub mod config;
pub mod runner;

/// Exit code for invalid configuration or arguments.
pub const EXIT_INVALID: i32 = 2;
/// Exit code for capacity errors (budget exceeded).
pub const EXIT_CAPACITY: i32 = 3;

/// Map a library error to the documented process exit code.
pub fn exit_code(error: &mobius_lab::Error) -> i32 {
    match error {
        mobius_lab::Error::Capacity(_) => EXIT_CAPACITY,
        _ => EXIT_INVALID,
    }
}

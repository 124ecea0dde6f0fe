//! Command-line front end for `tubeloss-core`: subcommands as library
//! functions, run reports, and exit-code mapping.

pub mod commands;
pub mod report;

pub use commands::{
    cmd_bands, cmd_il, cmd_masslaw, cmd_stack, cmd_stl, cmd_synth, BandRange, MassLawPoints, Options, SynthRun,
};
pub use report::{Narrowband, Provenance, RunReport};

use tubeloss_core::{Error, ErrorClass};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err.class() {
        ErrorClass::Input => EXIT_INPUT,
        ErrorClass::Numerical => EXIT_NUMERICAL,
    }
}

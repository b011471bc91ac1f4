//! File formats, parallel drivers and the command-line front end for
//! [`dynspec_core`].

pub mod cli;
mod error;
pub mod io;
pub mod output;
pub mod parallel;
pub mod verify;

pub use error::CliError;

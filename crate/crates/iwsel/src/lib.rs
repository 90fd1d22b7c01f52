//! Sweeps, file formats and the command-line front end around
//! [`iwsel_core`].

pub mod error;
pub mod formats;
pub mod harness;

pub use error::Error;

//! Command-line experiment driver built on the `qderiv` library.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod fit;
pub mod reference;

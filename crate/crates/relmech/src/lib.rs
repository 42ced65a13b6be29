//! File formats, JSON output, batch checks and the `relmech` command line.

pub mod batch;
pub mod cli;
pub mod io;
pub mod json;

//! Command line and HTTP front ends for `termheat-core`.

pub mod cli;
pub mod http;
pub mod server;

//! Command-line driver and HTTP session server for reversing Petri nets.

pub mod commands;
pub mod server;

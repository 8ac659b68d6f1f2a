//! Text format, state serialization, and interactive sessions.

pub mod dsl;
pub mod json;
pub mod session;

//! Configuration types for the command-line front end, exposed as a
//! library so integration tests can exercise the JSON schema directly.

pub mod config;

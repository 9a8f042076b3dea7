//! Library surface of the batch front-end, exposed for the integration and
//! acceptance suites.

pub mod args;
pub mod commands;
pub mod report;
pub mod setup;

//! Library surface of the batch driver (exposed for the integration tests).

pub mod config;
pub mod run;
pub mod summary;

//! The `inkmetrics` command-line tool and its annotation service.

pub mod commands;
pub mod service;

pub use commands::run;

//! Command line and HTTP front ends for `lifelines-core`.

pub mod cli;
pub mod config;
pub mod service;

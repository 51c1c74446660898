//! Batch front end for loop synthesis, verification, simulation and embedding.

pub mod args;
pub mod config;
pub mod run;
pub mod samples;

//! The `veriodd` command line and its HTTP service.

pub mod commands;
pub mod select;
pub mod service;

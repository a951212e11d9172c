//! Std companion to `acetab-core`: plan files on disk, CSV batch inputs,
//! the `acetab` command line and the HTTP planning service.

pub mod cli;
pub mod io;
pub mod report;
pub mod service;
pub mod store;

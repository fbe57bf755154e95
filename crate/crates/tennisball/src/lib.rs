//! File formats, report writers and the parallel runner behind `tbl`.

pub mod commands;
pub mod config;
pub mod report;
pub mod runner;
pub mod vector_io;

//! Certification diagnostics, experiment configuration and reporting on
//! top of [`abvar_core`].

pub mod config;
pub mod diagnostics;
pub mod optimize;
pub mod rank;
pub mod report;
pub mod suites;

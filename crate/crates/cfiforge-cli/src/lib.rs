//! Library half of the `cfiforge` command: verification suites and export formats.

pub mod export;
pub mod suites;

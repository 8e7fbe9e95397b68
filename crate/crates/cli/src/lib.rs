//! File formats, multiprecision scalar and command-line front end for `twospectra`.

pub mod args;
pub mod commands;
pub mod decimal;
pub mod format;
pub mod mp;
pub mod report;

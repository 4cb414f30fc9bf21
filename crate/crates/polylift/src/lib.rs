//! File formats, JSON encodings and the command line front end for `polylift-core`.

pub mod cli;
pub mod format;
pub mod json;

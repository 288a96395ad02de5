//! File formats and instance generation behind the `jagg` binary.

pub mod formats;
pub mod gen;

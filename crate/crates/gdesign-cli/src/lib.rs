//! Companion crate to `gdesign-core`: bundled data files, the design
//! output format, and the `gdesign` binary's command implementations.

pub mod bundled;
pub mod designfile;
pub mod gddfile;

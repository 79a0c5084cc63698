//! Annotated data-stream schemes for graph problems.
//!
//! A streaming Verifier keeps small finite-field sketches of a graph stream;
//! after the stream ends, an untrusted Prover sends a help message that the
//! Verifier checks against its sketches before producing an answer.

pub mod edgecount;
pub mod extension;
pub mod field;
pub mod gen;
pub mod graphapps;
pub mod oracle;
pub mod protocol;
pub mod registry;
pub mod setops;
pub mod sssp;
pub mod stream;
pub mod triangles;

pub use field::{Fe, FieldConfig, FieldError};

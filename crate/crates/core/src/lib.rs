//! Random k-XORSAT solution-space toolkit: peeling and 2-cores, {0,★}
//! message passing, density evolution, sparse kernel bases, cluster
//! decomposition and conductance.

pub mod error;
pub mod experiment;
pub mod gf2;
pub mod graph;
pub mod bp;
pub mod conduct;
pub mod de;
pub mod peel;
pub mod structure;

pub use error::{Error, Result};

pub mod controllability;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod matching;
pub mod matroid;
pub mod numerics;
pub mod optimize;
pub mod par;
pub mod perf;
pub mod set;
pub mod simulate;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};

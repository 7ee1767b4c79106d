//! Rooted maps: exact counting and uniform sampling through the core–kernel
//! decomposition, with statistical checks of the large-size limit laws.

pub mod cli;
pub mod decompose;
pub mod enumerate;
pub mod forest;
pub mod map;
pub mod numeric;
pub mod rng;
pub mod sample;
pub mod stats;

pub use decompose::{decompose, recompose, Decomposition, Kernel};
pub use forest::{ForestCode, RootMark, StepPath};
pub use map::{MapError, RootedMap};
pub use rng::RngHandle;

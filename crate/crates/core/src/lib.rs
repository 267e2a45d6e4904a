//! Weighted Hurwitz numbers computed by permutation enumeration, character
//! sums and the hypergeometric tau function, together with the adapted
//! bases, Christoffel–Darboux kernel, spectral curve and topological
//! recursion built on top of them.

pub mod basis;
pub mod certified;
pub mod config;
pub mod correlators;
pub mod curve;
pub mod error;
pub mod hurwitz;
pub mod kernel;
pub mod partitions;
pub mod tau;
pub mod toprec;

pub use config::{Caps, Param, WeightConfig, WeightSpec};
pub use error::{CoreError, Result};
pub use partitions::Partition;

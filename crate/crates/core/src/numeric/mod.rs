//! Exact and certified arithmetic used throughout the crate.

pub mod hpoly;
pub mod interval;
pub mod phase;
pub mod sum;
pub mod surd;

pub use hpoly::HPoly;
pub use interval::Interval;
pub use phase::Phase;
pub use sum::{ComplexSum, NeumaierSum};
pub use surd::Surd;

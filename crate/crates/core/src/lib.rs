//! Hardy-field sequences and multiple ergodic averages: exact growth
//! calculus for normal forms, certified integer parts, explicit systems,
//! averaging experiments, uniformity seminorms, PET induction, Taylor
//! windows and equidistribution diagnostics.

pub mod averages;
pub mod equidist;
pub mod error;
pub mod hardy;
pub mod numeric;
pub mod pet;
pub mod seminorms;
pub mod sequences;
pub mod systems;
pub mod taylor;

pub use error::{Error, Result};

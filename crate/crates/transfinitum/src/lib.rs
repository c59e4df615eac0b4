//! Transfinite arithmetic: ordinal notations with epsilon atoms, limit
//! towers, skands (non-well-founded nested sets indexed by ordinals) and
//! generalized binary fractions of transfinite length.

pub mod cli;
pub mod epsilon;
pub mod genreal;
pub mod ordinal;
pub mod skand;

pub use ordinal::{Ordinal, OrdinalError};

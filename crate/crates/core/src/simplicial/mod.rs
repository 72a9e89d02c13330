//! Simplicial sets and presheaves, stalkwise equivalence, Čech nerves.

mod cech;
mod spresheaf;
mod sset;
mod stalkwise;

pub use cech::{cech_nerve, CechNerve};
pub use spresheaf::{bi_yoneda, bi_yoneda_source, simplicial_stalk, BiYoneda, SMap, SimpPresheaf};
pub use sset::{monotone_sequences, TruncSSet};
pub use stalkwise::{stalkwise_equiv_embedded, stalkwise_failure, verify_iso_theorem, IsoReport, StalkFailure};

use thiserror::Error;

/// Truncation level used when none is given.
pub const DEFAULT_TRUNCATION: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("level {n} is above the truncation {d}")]
    TruncationTooLow { n: usize, d: usize },
    #[error("the {0} space is not in the ambient list")]
    NotInAmbient(String),
    #[error("assertion failed at {point}: {detail}")]
    AssertionFailure { point: String, detail: String },
    #[error("family is not a cover of its target")]
    NotCover,
    #[error("{0}")]
    Shape(String),
}

#[cfg(test)]
mod tests;

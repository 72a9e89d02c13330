//! Presheaves and sheaves on the site of opens.

mod points;
mod presheaf;
mod sheafify;
mod stalk;
mod topos;

pub use points::{continuity_against, separate, PointFunctor, Span};
pub use presheaf::{Counterexample, Presheaf, PresheafMap, SheafReport};
pub use sheafify::{plus, plus_full, plus_map, plus_unit, sheafify, sheafify_map, Plus};
pub use stalk::{germ, stalk, stalk_colimit, stalk_map, Colimit, Stalk};
pub use topos::{
    check_exponential_adjunction, classify, curry, exponential, pullback_of_true, subobject_classifier, uncurry,
    Exponential, Omega,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("presheaf shape mismatch: {0}")]
    Shape(String),
    #[error("{0} is not contained in {1}")]
    NotSubopen(String, String),
    #[error("restriction {0} → {1} is missing or out of range")]
    BadRestriction(String, String),
    #[error("restrictions are not functorial: {0}")]
    NotFunctorial(String),
    #[error("map is not a monomorphism")]
    NotMono,
}

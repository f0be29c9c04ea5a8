//! Exact enumeration of the groups generated by the canonical observables.
//!
//! `A0 = X` and `A1 = z²D₀X` are monomial with entries in the `4n`-th roots
//! of unity, so every element of `⟨A0, A1⟩` is a [`MonomialUnitary`] and all
//! comparisons are integer comparisons.

mod catalogue;
mod irreps;
mod monomial;
mod presentation;

pub use catalogue::{enumerate_group, GroupCatalogue, MultiplicationTable, DEFAULT_CAP};
pub use irreps::{g3_irreps, ring_relation_defect, Irrep};
pub use monomial::MonomialUnitary;
pub use presentation::{
    alice_presentation, bob_presentation, commutation_check, commutation_failures, evaluate_word,
    normal_form_enumerate, verify_presentation, GroupWord, NormalForm, Presentation, PresentationReport,
};

use thiserror::Error;

use crate::numerics::ComplexMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("enumeration stopped at the cap of {cap} elements ({found} found so far)")]
    CapExceeded { cap: usize, found: usize },
    #[error("generators have differing dimensions")]
    DimensionMismatch,
    #[error("normal forms {first} and {second} evaluate to the same element")]
    Collision { first: String, second: String },
    #[error("n must be at least 2, got {0}")]
    Order(u32),
    #[error("element is not in the catalogue")]
    NotAnElement,
}

/// Anything words can be evaluated in.
pub trait GroupLike: Clone {
    fn group_mul(&self, other: &Self) -> Self;
    fn group_inverse(&self) -> Self;
    fn group_identity(&self) -> Self;
}

/// Unitary matrices; the inverse is the adjoint.
impl GroupLike for ComplexMatrix {
    fn group_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn group_inverse(&self) -> Self {
        self.adjoint()
    }
    fn group_identity(&self) -> Self {
        ComplexMatrix::identity(self.rows())
    }
}

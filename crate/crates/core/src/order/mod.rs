//! Finite posets, lattices, Heyting and Boolean algebras.
//!
//! Everything is an explicit operation table over `0..n`; the order is
//! derived from the meet (`x ≤ y` iff `x ∧ y = x`).

mod filter;
mod heyting;
mod lattice;
mod poset;

pub use filter::{
    filters, prime_filter_representation, prime_filters, prime_ideals, quotient_by_filter, Filter,
    FilterQuotient, Ideal,
};
pub use heyting::{heyting_from_lattice, BooleanAlgebra, HeytingAlgebra};
pub use lattice::{
    check_distributive, downset_lattice, is_sublocal, sublocality_witness, DistLattice,
    Distributivity, Lattice, LatticeHom,
};
#[allow(unused_imports)]
pub(crate) use lattice::mask_name;
pub use poset::FinPoset;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("table has {found} entries, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("empty carrier")]
    Empty,
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive at ({0}, {1}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("not a lattice: {law} fails at {witness:?}")]
    NotALattice { law: &'static str, witness: Vec<usize> },
    #[error("elements {0} and {1} have no meet")]
    NoMeet(usize, usize),
    #[error("elements {0} and {1} have no join")]
    NoJoin(usize, usize),
    #[error("degenerate lattice: bottom equals top")]
    Degenerate,
    #[error("not distributive: witness ({0}, {1}, {2})")]
    NotDistributive(usize, usize, usize),
    #[error("residuation fails for x={0}, y={1}, z={2}")]
    NotHeyting(usize, usize, usize),
    #[error("not Boolean: {0} has no complement")]
    NotBoolean(usize),
    #[error("not a filter: {0}")]
    NotAFilter(String),
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
}

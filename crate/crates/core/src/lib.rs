//! Spectra and sheaf representations of finite algebraic structures.

pub mod algebra;
pub mod fol;
pub mod io;
pub mod lattice_spec;
pub mod lex;
pub mod order;
pub mod prop;
pub mod report;
pub mod ring;
pub mod space;
pub mod suite;

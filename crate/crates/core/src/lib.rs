//! Computations with G-lattices for norm one tori whose Galois closure is dihedral.
//!
//! The crate is layered bottom-up: exact integer matrices ([`intmat`]),
//! finite permutation groups ([`groups`]), lattices with a group action
//! ([`glattice`]), Tate cohomology ([`cohomology`]), flabby and coflabby
//! resolutions ([`resolution`]), certificates ([`certify`]), the explicit
//! dihedral constructions ([`paperdihedral`]) and the rationality
//! classifier ([`classify`]).

pub mod abelian;
pub mod certify;
pub mod classify;
pub mod cohomology;
pub mod corpus;
pub mod error;
pub mod glattice;
pub mod groups;
pub mod int;
pub mod intmat;
pub mod paperdihedral;
pub mod resolution;

pub use abelian::AbelianInvariants;
pub use error::{Error, Result};
pub use int::Int;
pub use intmat::{IntMatrix, SmithForm};

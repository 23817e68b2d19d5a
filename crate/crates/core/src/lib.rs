//! Twisted forms of split toric varieties over non-closed fields.
//!
//! Fans are validated exactly ([`fan`]), their lattice automorphism groups are
//! found by ray-permutation search ([`aut`]), Galois actions are enumerated
//! up to conjugacy ([`galois`]) and each action class gets its first Galois
//! cohomology set from lattice data and a field backend ([`cohomology`]).
//! [`classify`] assembles the pieces into classification reports.
//! All arithmetic is arbitrary precision ([`linalg`]).

#![allow(clippy::manual_is_multiple_of, clippy::needless_range_loop)]

pub mod aut;
pub mod builtin;
pub mod classify;
pub mod cohomology;
pub mod fan;
pub mod galois;
pub mod linalg;

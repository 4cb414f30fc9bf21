//! Exact polyhedral constructions for deriving linear descriptions by lifting:
//! graph gadgets, circulation feasibility, brute-force vertex sets,
//! inequality generators, orbisack block inequalities and a double
//! description based verifier.

#![no_std]

extern crate alloc;

pub mod circulation;
pub mod descriptions;
pub mod exactnum;
pub mod families;
pub mod graphcore;
pub mod lifting;
pub mod orbisack;
pub mod verify;

pub use exactnum::{ExtendedRational, NumError, RatMatrix, Rational};
pub use graphcore::{Digraph, Graph, NodeSet};

//! Reversal and prefix-reversal balls of permutations, peg permutations and their
//! grid classes.

pub mod basis;
pub mod distance;
pub mod enumeration;
pub mod error;
pub mod generators;
pub mod inflation;
pub mod peg;
pub mod perm;
pub mod verify;

pub use basis::{membership, peg_basis, standard_basis, MSet, Membership, PegBasis, StandardBasis};
pub use distance::{lower_bound, DistanceTable, Limits, Model, Oracle, TableKind};
pub use enumeration::{count_ball, sequence, Method};
pub use error::{Error, Result};
pub use generators::{generating_set, GeneratingSet};
pub use inflation::{
    grid_enumerate, grid_member, grid_member_peg, monotone_inflate, InflationVector,
};
pub use peg::{peg_of, Decoration, ExceptionalKind, PegPermutation, Strip, StripDirection};
pub use perm::Permutation;
pub use verify::{Check, Claims, Status, Suite, VerifyOptions};

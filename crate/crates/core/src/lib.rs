//! Exact Hall algebras of quiver representations over `F_p`.
//!
//! [`RepCategory`] classifies representations and counts Hall numbers,
//! [`hall`] builds the twisted Hall algebra, [`dh`] its double, and [`uq`] the
//! images of the quantum group generators. [`cplx`] is an independent model
//! through complexes of projectives, and [`verify`] runs the check suites.
//! The guide in `book/` walks through each layer.

pub mod cache;
pub mod cplx;
pub mod dh;
pub mod error;
pub mod fp;
pub mod hall;
pub mod quiver;
pub mod repcat;
pub mod report;
pub mod scalar;
pub mod uq;
pub mod verify;

pub use error::{HallError, Result};
pub use quiver::{KVector, Quiver};
pub use repcat::{ClassId, IsoClass, RepCategory};
pub use scalar::Scalar;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/quivers.md")]
mod book_quivers {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/representations.md")]
mod book_representations {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/hall-algebra.md")]
mod book_hall_algebra {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/double.md")]
mod book_double {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/quantum-group.md")]
mod book_quantum_group {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/complexes.md")]
mod book_complexes {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/verification.md")]
mod book_verification {}

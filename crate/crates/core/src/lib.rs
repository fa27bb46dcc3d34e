//! Gonality, Clifford index and birational k-very ampleness for complete
//! linear systems on Del Pezzo surfaces, decided from Picard lattice data.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: the intersection form on `Pic S_n`, canonical class, genus.
//! * [`cones`]: (-1)-curves, conic and line-pullback classes, nef/ample/
//!   effective tests and `h^0`.
//! * [`gonality`]: the decision procedures built on those primitives.
//! * [`tabulate`]: batch sweeps and the structured-versus-brute-force audit.
//! * [`cli`]: the `dpgon` command line frontend.

pub mod cli;
pub mod cones;
pub mod error;
pub mod gonality;
pub mod lattice;
pub mod tabulate;

pub use error::{Error, Result};
pub use lattice::{DivisorClass, SurfaceId};

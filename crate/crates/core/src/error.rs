use thiserror::Error;

use crate::lattice::{DivisorClass, LatticeError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("class is not nef: {0}")]
    NotNef(DivisorClass),
    #[error("sectional genus {genus} of {class} is below the required {required}")]
    GenusTooSmall {
        class: DivisorClass,
        genus: i64,
        required: i64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A computed invariant contradicted a structural theorem. Never expected.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("map is not equivariant for generator {0}")]
    NotEquivariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("resource bound exceeded: {what} (bound {bound})")]
    ResourceBound { what: String, bound: usize },
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

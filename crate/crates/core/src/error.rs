use alloc::string::String;
use alloc::vec::Vec;

use crate::eigensolver::TraceEntry;
use crate::geometry::Point;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("field has {got} values but the mesh has {expected} vertices, or belongs to another mesh")]
    MeshMismatch { expected: usize, got: usize },

    #[error("field is constant; the constraint projection would return the zero field")]
    ConstantField,

    #[error("field is zero; the Rayleigh quotient is undefined")]
    ZeroField,

    #[error("point ({}, {}) lies outside the domain", .0[0], .0[1])]
    OutsideDomain(Point),

    #[error("solver diverged at iteration {iteration} (p = {p}): {reason}")]
    Diverged {
        p: f64,
        iteration: usize,
        reason: String,
        trace: Vec<TraceEntry>,
    },
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

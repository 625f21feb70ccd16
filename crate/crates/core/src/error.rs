use thiserror::Error;

use crate::lattice::Site;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("site ({x},{j}) has negative vertical coordinate")]
    NegativeRow { x: i64, j: i64 },

    #[error("operator {op}: piece `{piece}` sends {site} below the boundary row")]
    RuleDefinition { op: String, piece: String, site: Site },

    #[error("operator {op}: overlapping pieces disagree at {site} ({first} vs {second})")]
    OverlapConflict {
        op: String,
        site: Site,
        first: String,
        second: String,
    },

    #[error("operator {op}: image of {site} is not a single basis vector")]
    NotABasisMap { op: String, site: Site },

    #[error("operator {op}: {a} and {b} share the image {image}")]
    NotInjective { op: String, a: Site, b: Site, image: Site },

    #[error("operator {op}: cannot invert piece `{piece}` symbolically")]
    SymbolicInverse { op: String, piece: String },

    #[error("operator {op}: symbolic adjoint disagrees with window inverse at {site}")]
    AdjointMismatch { op: String, site: Site },

    #[error("{site} lies outside the tabulated domain of {op}")]
    OutOfDomain { op: String, site: Site },

    #[error("preimage of {site} under {op} cannot be decided inside the tabulated domain")]
    Indeterminate { op: String, site: Site },

    #[error("invalid model parameters: {0}")]
    Params(String),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("no stabilization for {site} after {cap} steps")]
    NoStabilization { site: Site, cap: usize },

    #[error("interaction support of ({u}, {u0}) reaches the scan edge at {site}")]
    SupportNotContained { u: String, u0: String, site: Site },

    #[error("{op} is not an isometry on the window: {reason}")]
    NotIsometry { op: String, reason: String },

    #[error("svg/ascii parse error: {0}")]
    Parse(String),
}

//! Exact discrete-time scattering on the half-space lattice `Z x N`.
//!
//! Operators are basis maps given by piecewise-affine rules. Wave operators
//! are computed as stabilized limits of `U^-n U0^n`, checked against closed
//! forms, decomposed into shift and unitary parts, and drawn as arrow diagrams.

pub mod action;
pub mod catalog;
pub mod error;
pub mod figures;
pub mod lattice;
pub mod operator;
pub mod region;
pub mod table;
pub mod verify;
pub mod wave;
pub mod window;
pub mod wold;

pub use error::{Error, Result};
pub use lattice::{Scalar, Site, StateVector};

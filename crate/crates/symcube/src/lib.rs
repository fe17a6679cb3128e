//! Symmetric-cube L-function data for level-1 modular eigenforms.
//!
//! The pipeline: exact q-expansions and Hecke eigenvalues ([`modforms`]),
//! symmetric-cube representation linear algebra and Euler factors ([`sym3rep`]),
//! arbitrary-precision L-values through a smoothed approximate functional
//! equation ([`lfunc`]), p-adic unit roots and interpolation data ([`padic`]),
//! and certificate assembly ([`certify`]).

pub(crate) mod arith;
pub mod ball;
pub mod certify;
pub mod error;
pub mod gammaz;
pub mod lfunc;
pub mod modforms;
pub mod padic;
pub mod sym3rep;

pub use error::SymcubeError;

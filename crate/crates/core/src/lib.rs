//! Numerics for symmetric α-stable noise added to a source X:
//! densities and their derivatives, the mixture density q_η of
//! Y = X + η^{1/α} N, the differential entropy h(Y), its dispersion
//! derivative, and grid certificates for the dominating functions that
//! make that derivative well defined.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod error;
pub mod mixture;
pub mod quad;
pub mod sampling;
pub mod source;
pub mod specfun;
pub mod stable;

pub use error::{Error, Result};

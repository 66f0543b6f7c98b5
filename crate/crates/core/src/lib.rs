//! Exact computation of Asai L-factors for ordinary representations of
//! `GL(2, K)`, `K/F` a quadratic extension of `F = Q_p` with `p` odd.
//!
//! Two independent routes are provided:
//!
//! * [`asai::lw_factor`] decomposes the multiplicatively induced
//!   Weil–Deligne parameter and multiplies Tate factors;
//! * [`asai::las_factor`] multiplies the Kirillov-model factor `L_1` by
//!   the product over distinguishing twists.
//!
//! [`asai::check_egal`] compares them as multisets of inverse roots.

pub mod asai;
pub mod charalg;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod euler;
pub mod oracle;
pub mod padic;
pub mod par;
pub mod towers;

pub use error::{Error, Result};

//! Numerical verification of the Green–Osher inequality for planar convex
//! bodies given by trigonometric support functions.
//!
//! Bodies live in [`support_body`], areas and the relative Steiner polynomial
//! in [`measures`], inradius/outradius and dilation positioning in
//! [`dilation`], and the inequality chain itself in [`greenosher`].

pub mod dilation;
pub mod error;
pub mod greenosher;
pub mod io;
pub mod lp;
pub mod measures;
pub mod plot;
pub mod support_body;
pub mod sweep;
pub mod trig;

pub use error::{Error, Result};

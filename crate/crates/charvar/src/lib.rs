//! Exact counting workbench for character varieties over finite fields.
//!
//! The crate computes solution counts of commutator equations in `GL_n(F_q)`,
//! assembles them into exact E-series, and checks the plethystic identity
//! `Exp(twisted series) = untwisted series` coefficient by coefficient, with
//! no floating point anywhere.  A second group of modules handles brane
//! tilings on closed surfaces, their dual quivers with potential, cuts and
//! (2-dimensional) Jacobi algebra presentations, together with the count-level
//! identities these satisfy (dimensional reduction, Morita rank doubling).

pub mod audit;
pub mod charcount;
pub mod classdata;
pub mod error;
pub mod exactq;
pub mod ffield;
pub mod limits;
pub mod plethys;
pub mod repscan;
pub mod tileforge;

pub use error::{Error, Result};
pub use limits::Limits;

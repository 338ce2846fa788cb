//! Symbolic verification and group classification of generalized eikonal
//! equations `u_a u_a = F(t, u, u_t)`.

pub mod catalog;
pub mod cli;
pub mod classify;
pub mod determining;
pub mod equiv;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod syntax;

pub use error::{Error, Result};

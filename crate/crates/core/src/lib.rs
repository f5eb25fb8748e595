//! Verification laboratory for global boundedness of degenerate and
//! non-uniform parabolic equations.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`]: exact rational computer algebra (canonical expressions,
//!   differentiation, certified positivity).
//! - [`aux`]: floating-point evaluators for the auxiliary function
//!   families and the fixed constants they produce.
//! - [`verify`]: a registry of identity, positivity, and inequality
//!   claims, each re-checked mechanically.
//! - [`grid`]: parameter chains, discrete domains, weight fields, and
//!   weighted norms.
//! - [`forge`]: degenerate weight constructions (annular non-doubling
//!   weight in log-scale arithmetic, distance weight).
//! - [`moser`]: the explicit iteration-constant pipeline producing the
//!   final sup-norm bound.
//! - [`pde`]: a finite-volume backward-Euler solver used to instantiate
//!   the bound on concrete problems.

pub mod aux;
pub mod config;
pub mod forge;
pub mod grid;
pub mod moser;
pub mod pde;
pub mod poly;
pub mod verify;

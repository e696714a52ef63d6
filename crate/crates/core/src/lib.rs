//! Desk-scale laboratory for noncommutative harmonic analysis on group von
//! Neumann algebras.
//!
//! The crate realizes, exactly where possible, the objects attached to a
//! conditionally negative length on a discrete group: the Gromov form and the
//! cocycle it induces, Riesz transforms and their row/column/twisted square
//! functions, gaussian crossed products and their Khintchine norms. A
//! Euclidean grid module covers Sobolev/Besov multiplier conditions and the
//! Poisson carré du champ, and a free-group module covers branch
//! Littlewood-Paley families.
//!
//! Data-parallel loops (Monte Carlo trials, per-band sweeps, time quadrature)
//! go through [`par`], which uses rayon when the `parallel` feature is on and
//! falls back to plain iteration otherwise.

pub mod algebra;
pub mod branches;
pub mod cocycles;
pub mod error;
pub mod euclidean;
pub mod gaussian;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod par;
pub mod quad;
pub mod report;
pub mod riesz;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Tool version stamped into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

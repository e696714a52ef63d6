//! Grid and FFT calculus on `ℝⁿ`, `n ≤ 3`.
//!
//! Frequency convention: `f̂(ξ) = ∫ f(x) e^{−2πi⟨x,ξ⟩} dx`, so `(−Δ)` has
//! symbol `4π²|ξ|²` and `√(−Δ)` has symbol `2π|ξ|`.

pub mod besov;
pub mod fractional;
pub mod grid;
pub mod partition;
pub mod poisson;
pub mod sobolev;

pub use grid::{Domain, GridFunction, GridSpec};
pub use partition::PartitionOfUnity;

/// The transform and operator convention, stamped into reports.
pub const CONVENTION: &str = "f^(xi) = int f(x) exp(-2 pi i <x,xi>) dx; (-Laplacian) <-> 4 pi^2 |xi|^2; sqrt(-Laplacian) <-> 2 pi |xi|";

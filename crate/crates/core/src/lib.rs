//! Reflected random-walk Metropolis (RMRW) sampling for power posteriors of
//! symmetric two-component Gaussian mixtures.
//!
//! The crate is organised around the objects a sampling study needs:
//!
//! - [`mixture`]: the generative model `½N(θ₀, I) + ½N(−θ₀, I)`, its stable
//!   log-density and (optionally contaminated) data generation.
//! - [`potential`]: the empirical potential `U` and the population potential
//!   `U₀` with gradients, Hessians and dissipativity margins.
//! - [`sampler`]: the reflected chain, the plain random-walk baseline and a
//!   deterministic multi-chain runner.
//! - [`diagnostics`]: grid references, total variation, mode balance, tail
//!   radius and mass, effective sample size and across-chain mixing times.
//! - [`theory`]: falsification-style numeric checks of the geometric
//!   inequalities behind the mixing analysis (Poincaré and Cheeger
//!   constants, quasi-concave isoperimetry, exact grid kernels and their
//!   conductance).
//! - [`experiments`]: end-to-end experiment drivers that write CSV, JSON and
//!   SVG artifacts; the `rmrw` binary is a thin wrapper around them.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod mixture;
pub mod potential;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod theory;

pub use error::{Error, Result};
pub use mixture::{ContaminationSpec, MixtureSpec, Noise};
pub use potential::{PowerPosterior, PriorSpec};
pub use sampler::{Algorithm, ChainTrace, Init, SamplerConfig};

//! Numerical machinery for the Dunkl transform on `R^d`: reflection-group
//! root systems with multiplicity weights, singular-weight quadrature,
//! closed-form kernels for `Z2^d` products, Hardy-space atoms, and the
//! weighted-inequality sweep harness built on top of them.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`] — normalized Bessel `j_alpha` and log-gamma, self-contained;
//! * [`root_system`] — root systems, reflections, the index `gamma`, the
//!   weight `w_k`;
//! * [`quadrature`] — 1-D Gauss–Legendre / Gauss–Jacobi rules;
//! * [`measure`] — integration against `w_k(y) dy`, ball volumes, the
//!   Mehta-type normalization constant;
//! * [`kernel`] — the Dunkl kernel `E_k(ix, y)` in closed form, its Taylor
//!   truncations and remainder bounds;
//! * [`transform`] — the Dunkl transform of compactly supported functions by
//!   weighted quadrature, with Plancherel self-validation;
//! * [`atoms`] — construction and certification of `(p, infinity, s)`-atoms;
//! * [`hardy`] — the weighted-inequality sweep: `S1`/`S2` splits, the
//!   `rho`-selection rules, envelopes, and divergence probes.
//!
//! With the `parallel` feature (on by default) the embarrassingly parallel
//! loops run on rayon; without it everything falls back to sequential
//! execution with identical results.

pub mod atoms;
mod dd;
pub mod error;
pub mod exec;
pub mod hardy;
pub mod kernel;
pub mod measure;
pub mod quadrature;
pub mod report;
pub mod root_system;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};

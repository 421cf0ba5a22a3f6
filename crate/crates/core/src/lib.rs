//! Numerics for the fractional conformal operator `P_σ` on the round sphere
//! and the variational, conformal and degree-theoretic machinery of the
//! fractional Nirenberg problem.
//!
//! The crate is organised bottom-up:
//!
//! * [`sphere`]: quadrature grids, real spherical-harmonic transforms and the
//!   special-function kernel (Gamma ratios, sphere volumes, eigenvalues).
//! * [`fracop`]: `P_σ` in spectral, singular-integral and Riesz-inverse form,
//!   plus the energies built on it.
//! * [`conformal`]: stereographic projection, the dilation family `φ_{P,t}`,
//!   the pushforward `T_φ` and the decomposition `M ≅ M₀ × B^{n+1}`.
//! * [`bubbles`]: the explicit extremals and the two-bubble test functions.
//! * [`variational`]: the constrained minimizer, multipliers, the
//!   Kazdan–Warner residual, the quadratic form `Q` and the Aubin explorers.
//! * [`degree`]: the moment map `G(P,t)`, Brouwer degree and index counting.

pub mod bubbles;
pub mod conformal;
pub mod degree;
mod error;
pub mod fracop;
pub mod presets;
pub mod sphere;
pub mod variational;

pub use error::{Error, Result};
pub use fracop::FracOperatorSpec;
pub use sphere::{GridField, Point, SpectralField, SphereFn, SphereGrid};

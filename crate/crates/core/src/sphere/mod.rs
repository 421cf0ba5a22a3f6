//! Grids, quadrature, real spherical-harmonic transforms and the
//! special-function kernel shared by every other module.

mod field;
mod function;
mod grid;
pub mod point;
pub mod quadrature;
mod sht;
pub mod special;

pub use field::{GridField, GridFieldSnapshot, HarmonicIndex, SpectralField, SpectralSnapshot};
pub use function::{numeric_gradient, SphereFn};
pub use grid::{GridDescriptor, SphereGrid};
pub use point::Point;
pub use sht::{sht_forward, sht_inverse, synthesize_jet, LocalJet, ShtPlan};
pub use special::{eigenvalue, multiplicity, sphere_volume};

/// `∫ f` over the sphere: `Σ wᵢ f(xᵢ)`.
pub fn quadrature(f: &GridField) -> f64 {
    f.grid()
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v)
        .sum()
}

//! The operator `P_σ`: spectral form, singular-integral form, its inverse
//! as a Riesz potential, and the energies built on it.

mod energy;
mod kernel;

pub use energy::{abs_energy_gap, functional_ek, hsigma_energy, sobolev_deficit};
pub use kernel::{apply_ps_singular, riesz_potential, RieszOperator, SingularOperator};

use crate::sphere::special::{gamma, ln_gamma};
use crate::sphere::{eigenvalue, sphere_volume, SpectralField};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Dimension `n` of the sphere and order `σ ∈ (0,1)` of the operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOperatorSpec {
    pub n: usize,
    pub sigma: f64,
}

impl FracOperatorSpec {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidOrder(sigma));
        }
        if n < 1 || (n as f64) <= 2.0 * sigma {
            return Err(Error::UnsupportedDimension(n));
        }
        Ok(FracOperatorSpec { n, sigma })
    }

    /// `n/2`
    fn half_n(&self) -> f64 {
        self.n as f64 / 2.0
    }

    /// Eigenvalue on degree-`k` harmonics.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        eigenvalue(k, self.n, self.sigma).expect("validated spec")
    }

    /// `P_σ(1) = Γ(n/2+σ)/Γ(n/2−σ)`.
    pub fn p_one(&self) -> f64 {
        self.eigenvalue(0)
    }

    /// Constant of the singular-integral form,
    /// `2^{2σ} σ Γ((n+2σ)/2) / (π^{n/2} Γ(1−σ))`.
    pub fn singular_constant(&self) -> f64 {
        let s = self.sigma;
        (2.0 * s * 2f64.ln() + s.ln() + ln_gamma(self.half_n() + s)
            - self.half_n() * PI.ln()
            - ln_gamma(1.0 - s))
        .exp()
    }

    /// Constant of the Riesz kernel, `Γ((n−2σ)/2) / (2^{2σ} π^{n/2} Γ(σ))`.
    pub fn riesz_constant(&self) -> f64 {
        let s = self.sigma;
        gamma(self.half_n() - s) / (2f64.powf(2.0 * s) * PI.powf(self.half_n()) * gamma(s))
    }

    /// Critical exponent `2n/(n−2σ)`.
    pub fn critical_exponent(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0 * self.sigma)
    }

    /// Exponent `(n+2σ)/(n−2σ)` of the nonlinearity.
    pub fn critical_power(&self) -> f64 {
        self.critical_exponent() - 1.0
    }

    /// `(n−2σ)/2`, the conformal weight.
    pub fn weight(&self) -> f64 {
        (self.n as f64 - 2.0 * self.sigma) / 2.0
    }

    pub fn volume(&self) -> f64 {
        sphere_volume(self.n)
    }

    fn require_s2(&self) -> Result<()> {
        if self.n != 2 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        Ok(())
    }
}

/// `P_σ v` on coefficients: degree `k` is multiplied by `λ_k`.
pub fn apply_ps_spectral(v: &SpectralField, spec: &FracOperatorSpec) -> Result<SpectralField> {
    spec.require_s2()?;
    Ok(v.scale_degrees(|k| spec.eigenvalue(k)))
}

/// `P_σ^{−1} v` on coefficients.
pub fn apply_ps_inverse_spectral(
    v: &SpectralField,
    spec: &FracOperatorSpec,
) -> Result<SpectralField> {
    spec.require_s2()?;
    Ok(v.scale_degrees(|k| 1.0 / spec.eigenvalue(k)))
}

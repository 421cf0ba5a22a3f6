use crate::conformal::mu_eta_solve;
use crate::fracop::{functional_ek, FracOperatorSpec};
use crate::sphere::{GridField, SpectralField, SphereGrid};
use crate::{Error, Result};
use std::f64::consts::PI;

fn check_high_degree(w: &SpectralField) -> Result<()> {
    let low = w
        .coeffs()
        .iter()
        .take(4)
        .fold(0.0f64, |m, c| m.max(c.abs()));
    if low > 1e-12 {
        return Err(Error::LowDegreeContent(format!(
            "degree ≤ 1 coefficient of size {low:e}"
        )));
    }
    Ok(())
}

/// `Q(w̃) = ⨍ (w̃ P_σ w̃ − λ₁ w̃²) = ω_n^{−1} Σ_{k≥2} (λ_k − λ₁) |c_{k,m}|²`
/// for `w̃` without degree-0 or degree-1 content.
pub fn quadratic_form_q(w: &SpectralField, spec: &FracOperatorSpec) -> Result<f64> {
    if spec.n != 2 {
        return Err(Error::UnsupportedDimension(spec.n));
    }
    check_high_degree(w)?;
    let l1 = spec.eigenvalue(1);
    let s: f64 = (2..=w.lmax())
        .map(|k| (spec.eigenvalue(k) - l1) * w.degree(k).iter().map(|c| c * c).sum::<f64>())
        .sum();
    Ok(s / spec.volume())
}

/// Second-order expansion of the energy around the constant on the
/// centred slice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionCheck {
    /// `E_1(1 + w̃ + μ + η·x)` with `(μ, η)` from the centring solve.
    pub lhs: f64,
    /// `P_σ(1) + Q(w̃)`
    pub rhs: f64,
    pub gap: f64,
    pub mu: f64,
}

/// Compare `E_1(w)`, `w = 1 + w̃ + μ(w̃) + η(w̃)·x ∈ M₀`, with `P_σ(1) + Q(w̃)`.
pub fn expansion_check_e(w: &SpectralField, spec: &FracOperatorSpec) -> Result<ExpansionCheck> {
    check_high_degree(w)?;
    let l = w.lmax().max(2);
    let grid = SphereGrid::s2(2 * l + 2, 4 * l + 4)?;
    let q = spec.critical_exponent();
    let (mu, eta) = mu_eta_solve(w, q, &grid)?;
    let mut full = w.with_lmax(l);
    let c1 = (4.0 * PI / 3.0).sqrt();
    full.set(0, 0, (1.0 + mu) * (4.0 * PI).sqrt());
    full.set(1, 1, eta[0] * c1);
    full.set(1, -1, eta[1] * c1);
    full.set(1, 0, eta[2] * c1);
    let lhs = functional_ek(&full, &GridField::constant(&grid, 1.0), spec)?;
    let rhs = spec.p_one() + quadratic_form_q(w, spec)?;
    Ok(ExpansionCheck {
        lhs,
        rhs,
        gap: lhs - rhs,
        mu,
    })
}

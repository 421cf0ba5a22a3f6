use super::FracOperatorSpec;
use crate::sphere::{sht_forward, sht_inverse, GridField, SpectralField, SphereGrid};
use crate::{Error, Result};
use std::sync::Arc;

/// `∫ v P_σ v = Σ λ_k |c_{k,m}|²`.
pub fn hsigma_energy(v: &SpectralField, spec: &FracOperatorSpec) -> f64 {
    (0..=v.lmax())
        .map(|k| spec.eigenvalue(k) * v.degree(k).iter().map(|c| c * c).sum::<f64>())
        .sum()
}

/// `E_K(v) = ⨍ v P_σ v / (⨍ K |v|^{2n/(n−2σ)})^{(n−2σ)/n}`, with the
/// denominator evaluated on `K`'s grid.
pub fn functional_ek(v: &SpectralField, k: &GridField, spec: &FracOperatorSpec) -> Result<f64> {
    let q = spec.critical_exponent();
    let vg = sht_inverse(v, k.grid())?;
    let den = vg.zip_with(k, |v, k| k * v.abs().powf(q))?.mean();
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::Undefined(format!(
            "⨍K|v|^q = {den:e} is not positive"
        )));
    }
    let num = hsigma_energy(v, spec) / spec.volume();
    Ok(num / den.powf(2.0 / q))
}

/// `(1/P_σ(1)) ⨍ v P_σ v − (⨍ |v|^{2n/(n−2σ)})^{(n−2σ)/n}`, nonnegative by
/// the sharp Sobolev inequality; the norm is evaluated on `grid`.
pub fn sobolev_deficit(
    v: &SpectralField,
    spec: &FracOperatorSpec,
    grid: &Arc<SphereGrid>,
) -> Result<f64> {
    let q = spec.critical_exponent();
    let vg = sht_inverse(v, grid)?;
    let norm = vg.map(|x| x.abs().powf(q)).mean().powf(2.0 / q);
    Ok(hsigma_energy(v, spec) / (spec.volume() * spec.p_one()) - norm)
}

/// `∫ v P_σ v − ∫ |v| P_σ |v|`, with `|v|` re-expanded at band limit `lmax`
/// on `grid`. Nonnegative for every `v`.
pub fn abs_energy_gap(
    v: &SpectralField,
    spec: &FracOperatorSpec,
    grid: &Arc<SphereGrid>,
    lmax: usize,
) -> Result<f64> {
    let a = sht_forward(&sht_inverse(v, grid)?.map(f64::abs), lmax)?;
    Ok(hsigma_energy(v, spec) - hsigma_energy(&a, spec))
}

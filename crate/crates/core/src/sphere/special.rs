//! Log-Gamma, Gamma ratios, harmonic multiplicities and sphere volumes.

use crate::{Error, Result};
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Asymptotic tail of `ln Γ(x) − [(x−½)ln x − x + ½ln 2π]`, valid for `x ≥ 10`.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0))))))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    let mut x = x;
    let mut prod = 1.0;
    while x < 10.0 {
        prod *= x;
        x += 1.0;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_tail(x) - prod.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// `ln Γ(a) − ln Γ(b)` for `a, b > 0`, accurate when `a` and `b` are large and close.
pub fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0);
    let shift = (10.0 - a.min(b)).max(0.0).ceil();
    let mut ratio = 1.0;
    let (mut aa, mut bb) = (a, b);
    for _ in 0..shift as usize {
        ratio *= aa / bb;
        aa += 1.0;
        bb += 1.0;
    }
    let d = aa - bb;
    d * aa.ln() + (bb - 0.5) * (d / bb).ln_1p() - d + stirling_tail(aa)
        - stirling_tail(bb)
        - ratio.ln()
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `∫_{-1}^{1} (1−u)^a (1+u)^b du = 2^{a+b+1} B(a+1, b+1)` for `a, b > −1`.
pub fn jacobi_weight_integral(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * 2f64.ln() + ln_beta(a + 1.0, b + 1.0)).exp()
}

/// Eigenvalue of the order-`2σ` conformal operator on degree-`k` harmonics of `S^n`:
/// `Γ(k + n/2 + σ) / Γ(k + n/2 − σ)`.
pub fn eigenvalue(k: usize, n: usize, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidOrder(sigma));
    }
    if n == 0 || (n as f64) <= 2.0 * sigma && k == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    let h = k as f64 + n as f64 / 2.0;
    Ok(ln_gamma_ratio(h + sigma, h - sigma).exp())
}

/// Dimension of the space of degree-`k` spherical harmonics on `S^n`:
/// `(2k+n−1)(k+n−2)! / ((n−1)! k!)`.
pub fn multiplicity(k: usize, n: usize) -> u64 {
    assert!(n >= 1);
    if n == 1 {
        return if k == 0 { 1 } else { 2 };
    }
    // C(k+n−2, k) computed incrementally stays integral at every step.
    let mut c: u128 = 1;
    for j in 1..=(n - 2) as u128 {
        c = c * (k as u128 + j) / j;
    }
    ((2 * k + n - 1) as u128 * c / (n - 1) as u128) as u64
}

/// Volume `ω_n = 2π^{(n+1)/2} / Γ((n+1)/2)` of the unit sphere `S^n`.
pub fn sphere_volume(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    match n {
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        _ => 2.0 * (h * PI.ln() - ln_gamma(h)).exp(),
    }
}

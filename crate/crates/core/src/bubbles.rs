//! The explicit extremals `v_β(x) = (√(β²−1)/(β − cos r))^{(n−2σ)/2}`,
//! `r = d(x, ξ)`, the two-bubble interaction integral and the antipodal
//! test-function quotient.

use crate::fracop::{apply_ps_spectral, FracOperatorSpec};
use crate::sphere::point::{axpy, dot, norm, scale, Point};
use crate::sphere::quadrature::gauss_legendre_interval;
use crate::sphere::special::ln_beta;
use crate::sphere::{sht_forward, sht_inverse, sphere_volume, GridField, SphereFn, SphereGrid};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// A bubble centred at `center` with concentration parameter `β > 1`
/// (`β = ∞` gives the constant 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bubble {
    center: Point,
    beta: f64,
    spec: FracOperatorSpec,
}

impl Bubble {
    pub fn new(center: Point, beta: f64, spec: &FracOperatorSpec) -> Result<Self> {
        if !(beta > 1.0) {
            return Err(Error::InvalidParameter(format!("β = {beta} must exceed 1")));
        }
        if (norm(&center) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(
                "bubble centre must be a unit vector".into(),
            ));
        }
        Ok(Bubble {
            center: scale(&center, 1.0 / norm(&center)),
            beta,
            spec: *spec,
        })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Value at the centre, `((β+1)/(β−1))^{(n−2σ)/4}`.
    pub fn peak(&self) -> f64 {
        if self.beta.is_infinite() {
            return 1.0;
        }
        ((self.beta + 1.0) / (self.beta - 1.0)).powf(self.spec.weight() / 2.0)
    }

    /// The bubble as a function of `c = x·ξ`.
    pub fn profile(&self, c: f64) -> f64 {
        if self.beta.is_infinite() {
            return 1.0;
        }
        let b = self.beta;
        // √(β²−1) written as √((β−1)(β+1)) to keep precision near β = 1
        (((b - 1.0) * (b + 1.0)).sqrt() / (b - c)).powf(self.spec.weight())
    }
}

impl SphereFn for Bubble {
    fn value(&self, x: &Point) -> f64 {
        self.profile(dot(x, &self.center))
    }

    fn gradient(&self, x: &Point, _n: usize) -> Point {
        if self.beta.is_infinite() {
            return [0.0; 4];
        }
        let c = dot(x, &self.center);
        let f = self.spec.weight() * self.profile(c) / (self.beta - c);
        scale(&axpy(&self.center, -c, x), f)
    }
}

/// The bubble sampled on `grid`.
pub fn bubble_field(b: &Bubble, grid: &Arc<SphereGrid>) -> GridField {
    GridField::sample(grid, b)
}

/// `‖P_σ v_β − P_σ(1) v_β^{(n+2σ)/(n−2σ)}‖ / ‖P_σ v_β‖` on `S^2`, with
/// `P_σ` applied to the degree-`lmax` expansion of `v_β`.
pub fn bubble_residual(b: &Bubble, lmax: usize) -> Result<f64> {
    let spec = &b.spec;
    if spec.n != 2 {
        return Err(Error::UnsupportedDimension(spec.n));
    }
    if b.beta.is_infinite() {
        // P_σ 1 = P_σ(1) = P_σ(1)·1^p
        return Ok(0.0);
    }
    let grid = SphereGrid::s2(2 * (lmax + 1), 4 * (lmax + 1))?;
    let v = bubble_field(b, &grid);
    let c = sht_forward(&v, lmax)?;
    let top: f64 = c.degree(lmax).iter().map(|x| x * x).sum::<f64>().sqrt();
    if top > 1e-12 * c.l2_norm() {
        return Err(Error::ResolutionTooCoarse(format!(
            "degree-{lmax} content {top:.2e} of the bubble at β = {} is not negligible",
            b.beta
        )));
    }
    let pv = sht_inverse(&apply_ps_spectral(&c, spec)?, &grid)?;
    let p1 = spec.p_one();
    let pw = spec.critical_power();
    let diff = pv.zip_with(&v, |a, v| a - p1 * v.powf(pw))?;
    Ok(diff.l2_norm() / pv.l2_norm())
}

/// Closed form of `A = 2^{−(n−2σ)/2} ω_{n−1} ∫₀^∞ 2^n r^{n−1}(1+r²)^{−(n+2σ)/2} dr`,
/// using `∫₀^∞ r^{n−1}(1+r²)^{−(n+2σ)/2} dr = ½ B(n/2, σ)`.
pub fn interaction_constant(spec: &FracOperatorSpec) -> f64 {
    let n = spec.n as f64;
    2f64.powf(-spec.weight())
        * sphere_volume(spec.n - 1)
        * 2f64.powf(n)
        * 0.5
        * ln_beta(n / 2.0, spec.sigma).exp()
}

/// Integrate a zonal integrand `f(r) sin^{n−1} r` over `r ∈ [0, π]` with
/// Gauss–Legendre panels graded geometrically away from `r = 0`, the first
/// panel of width `h0`.
fn graded_integral(h0: f64, nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let mut a = 0.0;
    let mut h = h0.min(PI);
    let mut sum = 0.0;
    while a < PI {
        let b = (a + h).min(PI);
        let (x, w) = gauss_legendre_interval(a, b, nodes);
        sum += x.iter().zip(&w).map(|(r, w)| w * f(*r)).sum::<f64>();
        a = b;
        h *= 2.0;
    }
    sum
}

/// `∫ v_{1,β}^{(n+2σ)/(n−2σ)} v_{2,β}` for bubbles at antipodal centres,
/// reduced to a one-dimensional integral in the geodesic distance to the
/// first centre.
pub fn interaction_integral(beta: f64, spec: &FracOperatorSpec) -> Result<f64> {
    let b = Bubble::new(crate::sphere::point::basis(0), beta, spec)?;
    let pw = spec.critical_power();
    let n = spec.n;
    let f = |r: f64| {
        let c = r.cos();
        b.profile(c).powf(pw) * b.profile(-c) * r.sin().powi(n as i32 - 1)
    };
    let h0 = ((beta - 1.0).sqrt() / 4.0).min(0.5);
    let coarse = graded_integral(h0, 24, f);
    let fine = graded_integral(h0 / 2.0, 32, f);
    if (coarse - fine).abs() > 1e-10 * fine.abs() {
        return Err(Error::ResolutionTooCoarse(format!(
            "interaction quadrature unstable at β = {beta}: {coarse} vs {fine}"
        )));
    }
    Ok(sphere_volume(n - 1) * fine)
}

/// Value of the antipodal two-bubble quotient and the threshold it is
/// compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotientReport {
    pub quotient: f64,
    /// `P_σ(1) ω_n^{2σ/n} 2^{2σ/n} / (max K)^{(n−2σ)/n}`
    pub bound: f64,
    /// `bound − quotient`
    pub margin: f64,
}

/// `∫ v P_σ v / (∫ K v^{2n/(n−2σ)})^{(n−2σ)/n}` for `v = v_{ξ,β} + v_{−ξ,β}`.
///
/// The numerator uses `P_σ v_i = P_σ(1) v_i^{(n+2σ)/(n−2σ)}` and the
/// interaction integral; the denominator is evaluated on `K`'s grid, and
/// `max K` is the maximum of the samples.
pub fn test_quotient(
    k: &GridField,
    beta: f64,
    center: &Point,
    spec: &FracOperatorSpec,
) -> Result<QuotientReport> {
    let grid = k.grid();
    if grid.dim() != spec.n {
        return Err(Error::GridMismatch(
            "grid dimension differs from the operator's".into(),
        ));
    }
    let b1 = Bubble::new(*center, beta, spec)?;
    let b2 = Bubble::new(scale(center, -1.0), beta, spec)?;
    let q = spec.critical_exponent();
    let omega = sphere_volume(spec.n);
    let num = 2.0 * spec.p_one() * (omega + interaction_integral(beta, spec)?);
    let den: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(k.values())
        .map(|((x, w), kv)| w * kv * (b1.value(x) + b2.value(x)).powf(q))
        .sum();
    if !(den > 0.0) {
        return Err(Error::Undefined(format!(
            "∫K v^q = {den:e} is not positive"
        )));
    }
    let quotient = num / den.powf(2.0 / q);
    let n = spec.n as f64;
    let kmax = k.max();
    let bound = spec.p_one() * (2.0 * omega).powf(2.0 * spec.sigma / n) / kmax.powf(2.0 / q);
    Ok(QuotientReport {
        quotient,
        bound,
        margin: bound - quotient,
    })
}

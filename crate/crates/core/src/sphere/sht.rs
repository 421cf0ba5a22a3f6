//! Real spherical-harmonic analysis and synthesis on Gauss–Legendre grids.

use super::field::{GridField, SpectralField};
use super::grid::SphereGrid;
use super::point::Point;
use crate::{Error, Result};
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

/// Storage offset of `P̄_k^m`, `0 ≤ m ≤ k`.
#[inline]
pub(crate) fn tri(k: usize, m: usize) -> usize {
    k * (k + 1) / 2 + m
}

/// Orthonormal associated Legendre functions `P̄_k^m(cos θ)` for
/// `0 ≤ m ≤ k ≤ lmax`, no Condon–Shortley phase, normalized so that
/// `2π ∫ P̄_k^m P̄_{k'}^m sin θ dθ = δ_{kk'}`.
pub(crate) fn legendre_table(ct: f64, st: f64, lmax: usize, p: &mut [f64]) {
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
        }
        p[tri(m, m)] = pmm;
        if m == lmax {
            break;
        }
        let mut p1 = (2.0 * m as f64 + 3.0).sqrt() * ct * pmm;
        p[tri(m + 1, m)] = p1;
        let mut p0 = pmm;
        for k in m + 2..=lmax {
            let (kf, mf) = (k as f64, m as f64);
            let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
            let b = (((kf - 1.0).powi(2) - mf * mf) / (4.0 * (kf - 1.0).powi(2) - 1.0)).sqrt();
            let p2 = a * (ct * p1 - b * p0);
            p[tri(k, m)] = p2;
            p0 = p1;
            p1 = p2;
        }
    }
}

/// Legendre table plus `d/dθ`. Requires `sin θ > 0`.
pub(crate) fn legendre_with_derivative(
    ct: f64,
    st: f64,
    lmax: usize,
    p: &mut [f64],
    dp: &mut [f64],
) {
    legendre_table(ct, st, lmax, p);
    for k in 0..=lmax {
        let kf = k as f64;
        for m in 0..=k {
            let mf = m as f64;
            let prev = if m < k { p[tri(k - 1, m)] } else { 0.0 };
            let c = if k > 0 {
                ((2.0 * kf + 1.0) / (2.0 * kf - 1.0) * (kf * kf - mf * mf)).sqrt()
            } else {
                0.0
            };
            dp[tri(k, m)] = (kf * ct * p[tri(k, m)] - c * prev) / st;
        }
    }
}

/// Precomputed Legendre and trigonometric tables for one grid and band limit.
pub struct ShtPlan {
    grid: Arc<SphereGrid>,
    lmax: usize,
    legendre: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ShtPlan {
    /// Build a plan. Synthesis works for any `lmax`; analysis is exact only
    /// when `lmax ≤ polar − 1` and `azimuthal ≥ 2·lmax + 1`, which is checked.
    pub fn new(grid: &Arc<SphereGrid>, lmax: usize) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::UnsupportedDimension(grid.dim()));
        }
        let ntri = tri(lmax, lmax) + 1;
        let np = grid.polar();
        let na = grid.azimuthal();
        let mut legendre = vec![0.0; np * ntri];
        for (i, &ct) in grid.cos_theta().iter().enumerate() {
            let st = (1.0 - ct * ct).sqrt();
            legendre_table(ct, st, lmax, &mut legendre[i * ntri..(i + 1) * ntri]);
        }
        let mut cos = vec![0.0; (lmax + 1) * na];
        let mut sin = vec![0.0; (lmax + 1) * na];
        for m in 0..=lmax {
            for j in 0..na {
                // reduce the angle exactly before taking trig functions
                let r = (m * j) % na;
                let a = 2.0 * PI * r as f64 / na as f64;
                cos[m * na + j] = a.cos();
                sin[m * na + j] = a.sin();
            }
        }
        Ok(ShtPlan {
            grid: grid.clone(),
            lmax,
            legendre,
            cos,
            sin,
        })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    fn check_analysis(&self) -> Result<()> {
        let max = (self.grid.polar() - 1).min((self.grid.azimuthal() - 1) / 2);
        if self.lmax > max {
            return Err(Error::BandLimitTooLarge {
                lmax: self.lmax,
                max,
            });
        }
        Ok(())
    }

    /// Quadrature projection onto harmonics of degree `≤ lmax`.
    pub fn forward(&self, f: &GridField) -> Result<SpectralField> {
        self.check_analysis()?;
        if f.grid().descriptor() != self.grid.descriptor() {
            return Err(Error::GridMismatch("field and plan grids differ".into()));
        }
        Ok(self.forward_values(f.values()))
    }

    pub(crate) fn forward_values(&self, values: &[f64]) -> SpectralField {
        let l = self.lmax;
        let na = self.grid.azimuthal();
        let ntri = tri(l, l) + 1;
        let dpsi = 2.0 * PI / na as f64;
        let mut out = SpectralField::zeros(l);
        let c = out.coeffs_mut();
        let mut a = vec![0.0; l + 1];
        let mut b = vec![0.0; l + 1];
        for (i, &wg) in self.grid.polar_weights().iter().enumerate() {
            let row = &values[i * na..(i + 1) * na];
            for m in 0..=l {
                let cm = &self.cos[m * na..(m + 1) * na];
                let sm = &self.sin[m * na..(m + 1) * na];
                let (mut sa, mut sb) = (0.0, 0.0);
                for j in 0..na {
                    sa += row[j] * cm[j];
                    sb += row[j] * sm[j];
                }
                a[m] = sa;
                b[m] = sb;
            }
            let w = wg * dpsi;
            let p = &self.legendre[i * ntri..(i + 1) * ntri];
            for k in 0..=l {
                let base = k * k + k;
                c[base] += w * p[tri(k, 0)] * a[0];
                for m in 1..=k {
                    let pw = w * SQRT_2 * p[tri(k, m)];
                    c[base + m] += pw * a[m];
                    c[base - m] += pw * b[m];
                }
            }
        }
        out
    }

    /// Evaluate `c` at the plan's grid nodes. Degrees above the plan's band
    /// limit are ignored.
    pub fn inverse(&self, c: &SpectralField) -> GridField {
        GridField::new(self.grid.clone(), self.inverse_values(c)).expect("finite synthesis")
    }

    pub(crate) fn inverse_values(&self, c: &SpectralField) -> Vec<f64> {
        let l = self.lmax.min(c.lmax());
        let na = self.grid.azimuthal();
        let ntri = tri(self.lmax, self.lmax) + 1;
        let coeffs = c.coeffs();
        let mut out = vec![0.0; self.grid.len()];
        let mut a = vec![0.0; l + 1];
        let mut b = vec![0.0; l + 1];
        for i in 0..self.grid.polar() {
            let p = &self.legendre[i * ntri..(i + 1) * ntri];
            for m in 0..=l {
                let (mut sa, mut sb) = (0.0, 0.0);
                for k in m..=l {
                    let base = k * k + k;
                    sa += coeffs[base + m] * p[tri(k, m)];
                    if m > 0 {
                        sb += coeffs[base - m] * p[tri(k, m)];
                    }
                }
                a[m] = if m == 0 { sa } else { SQRT_2 * sa };
                b[m] = SQRT_2 * sb;
            }
            let row = &mut out[i * na..(i + 1) * na];
            for m in 0..=l {
                let cm = &self.cos[m * na..(m + 1) * na];
                let sm = &self.sin[m * na..(m + 1) * na];
                for j in 0..na {
                    row[j] += a[m] * cm[j] + b[m] * sm[j];
                }
            }
        }
        out
    }
}

/// Spherical-harmonic coefficients of `f` up to degree `lmax`.
pub fn sht_forward(f: &GridField, lmax: usize) -> Result<SpectralField> {
    ShtPlan::new(f.grid(), lmax)?.forward(f)
}

/// Synthesize `c` on `grid`.
pub fn sht_inverse(c: &SpectralField, grid: &Arc<SphereGrid>) -> Result<GridField> {
    Ok(ShtPlan::new(grid, c.lmax())?.inverse(c))
}

/// Value, gradient and covariant Hessian of a field at one node, in the
/// orthonormal frame `(e_θ, e_ψ)`.
#[derive(Clone, Copy, Debug)]
pub struct LocalJet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
    pub e_theta: Point,
    pub e_psi: Point,
}

impl LocalJet {
    /// Tangential gradient as an ambient vector.
    pub fn ambient_gradient(&self) -> Point {
        let mut g = [0.0; 4];
        for i in 0..3 {
            g[i] = self.grad[0] * self.e_theta[i] + self.grad[1] * self.e_psi[i];
        }
        g
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }
}

/// Exact value, gradient and Hessian of a band-limited field at every node
/// of an `S^2` grid.
pub fn synthesize_jet(c: &SpectralField, grid: &Arc<SphereGrid>) -> Result<Vec<LocalJet>> {
    if grid.dim() != 2 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let l = c.lmax();
    let na = grid.azimuthal();
    let ntri = tri(l, l) + 1;
    let mut p = vec![0.0; ntri];
    let mut dp = vec![0.0; ntri];
    let mut ddp = vec![0.0; ntri];
    let mut out = Vec::with_capacity(grid.len());
    let coeffs = c.coeffs();
    // per-order sums: [value, d/dθ, d²/dθ²] for cos and sin parts
    let mut sums = vec![[[0.0f64; 3]; 2]; l + 1];
    for &ct in grid.cos_theta() {
        let st = (1.0 - ct * ct).sqrt();
        let cot = ct / st;
        legendre_with_derivative(ct, st, l, &mut p, &mut dp);
        for k in 0..=l {
            let kk = (k * (k + 1)) as f64;
            for m in 0..=k {
                let t = tri(k, m);
                let m2 = (m * m) as f64;
                ddp[t] = -cot * dp[t] - (kk - m2 / (st * st)) * p[t];
            }
        }
        for m in 0..=l {
            let mut s = [[0.0; 3]; 2];
            for k in m..=l {
                let t = tri(k, m);
                let base = k * k + k;
                let ca = coeffs[base + m];
                s[0][0] += ca * p[t];
                s[0][1] += ca * dp[t];
                s[0][2] += ca * ddp[t];
                if m > 0 {
                    let cb = coeffs[base - m];
                    s[1][0] += cb * p[t];
                    s[1][1] += cb * dp[t];
                    s[1][2] += cb * ddp[t];
                }
            }
            let f = if m == 0 { 1.0 } else { SQRT_2 };
            for part in &mut s {
                for v in part.iter_mut() {
                    *v *= f;
                }
            }
            sums[m] = s;
        }
        for j in 0..na {
            let psi = grid.psi(j);
            let (mut v, mut vt, mut vtt, mut vp, mut vpp, mut vtp) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for (m, s) in sums.iter().enumerate() {
                let r = (m * j) % na;
                let ang = 2.0 * PI * r as f64 / na as f64;
                let (sn, cs) = ang.sin_cos();
                let mf = m as f64;
                v += s[0][0] * cs + s[1][0] * sn;
                vt += s[0][1] * cs + s[1][1] * sn;
                vtt += s[0][2] * cs + s[1][2] * sn;
                vp += mf * (-s[0][0] * sn + s[1][0] * cs);
                vtp += mf * (-s[0][1] * sn + s[1][1] * cs);
                vpp += -mf * mf * (s[0][0] * cs + s[1][0] * sn);
            }
            let (sp, cp) = psi.sin_cos();
            let h01 = (vtp - cot * vp) / st;
            out.push(LocalJet {
                value: v,
                grad: [vt, vp / st],
                hess: [[vtt, h01], [h01, vpp / (st * st) + cot * vt]],
                e_theta: [ct * cp, ct * sp, -st, 0.0],
                e_psi: [-sp, cp, 0.0, 0.0],
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereFn;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_harmonic_is_recovered() {
        let g = SphereGrid::s2(16, 32).unwrap();
        let y = SpectralField::harmonic(15, 1, 0);
        let f = sht_inverse(&y, &g).unwrap();
        let c = sht_forward(&f, 15).unwrap();
        assert!((c.get(1, 0) - 1.0).abs() < 1e-13);
        let others: f64 = c
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 2)
            .map(|(_, v)| v.abs())
            .sum();
        assert!(others < 1e-12);
    }

    #[test]
    fn round_trip_random_lmax16() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = SpectralField::random(&mut rng, 16, 0, 0.0);
        let g = SphereGrid::s2_for_lmax(16).unwrap();
        let back = sht_forward(&sht_inverse(&c, &g).unwrap(), 16).unwrap();
        let err = back
            .coeffs()
            .iter()
            .zip(c.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let c = SpectralField::random(&mut rng, 20, 0, 0.3);
        let g = SphereGrid::s2(21, 42).unwrap();
        let f = sht_inverse(&c, &g).unwrap();
        assert!((f.l2_norm() - c.l2_norm()).abs() < 1e-10 * c.l2_norm());
    }

    #[test]
    fn band_limit_checked() {
        let g = SphereGrid::s2(8, 16).unwrap();
        let f = GridField::constant(&g, 1.0);
        assert!(matches!(
            sht_forward(&f, 8),
            Err(Error::BandLimitTooLarge { .. })
        ));
        assert!(sht_forward(&f, 7).is_ok());
    }

    #[test]
    fn jet_matches_closed_forms() {
        // v = x₃² has Laplacian 2 − 12 x₃² + ... : Δ(x₃²) = 2 − 6x₃² on S².
        let g = SphereGrid::s2(8, 16).unwrap();
        let f = GridField::sample(&g, &|x: &Point| x[2] * x[2]);
        let c = sht_forward(&f, 4).unwrap();
        let jets = synthesize_jet(&c, &g).unwrap();
        for (x, j) in g.nodes().iter().zip(&jets) {
            assert!((j.value - x[2] * x[2]).abs() < 1e-13);
            assert!((j.laplacian() - (2.0 - 6.0 * x[2] * x[2])).abs() < 1e-11);
            let grad = j.ambient_gradient();
            let want = [
                -2.0 * x[2] * x[2] * x[0],
                -2.0 * x[2] * x[2] * x[1],
                2.0 * x[2] * (1.0 - x[2] * x[2]),
            ];
            for i in 0..3 {
                assert!((grad[i] - want[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jet_hessian_of_linear_function() {
        // Covariant Hessian of a linear function ℓ(x) = a·x is −ℓ·Id.
        let g = SphereGrid::s2(6, 12).unwrap();
        let a = [0.3, -0.7, 0.5, 0.0];
        let f = GridField::sample(&g, &|x: &Point| a[0] * x[0] + a[1] * x[1] + a[2] * x[2]);
        let c = sht_forward(&f, 3).unwrap();
        for (x, j) in g.nodes().iter().zip(synthesize_jet(&c, &g).unwrap()) {
            let l = a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
            assert!((j.hess[0][0] + l).abs() < 1e-12);
            assert!((j.hess[1][1] + l).abs() < 1e-12);
            assert!(j.hess[0][1].abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn quadrature_exact_on_harmonic_products(k1 in 0usize..12, k2 in 0usize..12, m1 in -11i64..12, m2 in -11i64..12) {
            prop_assume!(m1.unsigned_abs() as usize <= k1 && m2.unsigned_abs() as usize <= k2);
            let g = SphereGrid::s2(12, 24).unwrap();
            let a = sht_inverse(&SpectralField::harmonic(11, k1, m1), &g).unwrap();
            let b = sht_inverse(&SpectralField::harmonic(11, k2, m2), &g).unwrap();
            let want = if (k1, m1) == (k2, m2) { 1.0 } else { 0.0 };
            prop_assert!((a.inner(&b).unwrap() - want).abs() < 1e-12);
        }

        #[test]
        fn synthesis_agrees_with_point_evaluation(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = SpectralField::random(&mut rng, 9, 0, 0.0);
            let g = SphereGrid::s2(5, 10).unwrap();
            let f = sht_inverse(&c, &g).unwrap();
            for (x, v) in g.nodes().iter().zip(f.values()).step_by(7) {
                prop_assert!((c.value(x) - v).abs() < 1e-12);
            }
        }
    }
}

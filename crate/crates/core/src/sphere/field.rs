use super::function::{numeric_gradient, SphereFn};
use super::grid::{GridDescriptor, SphereGrid};
use super::point::{Point, ZERO};
use super::sht::{legendre_table, legendre_with_derivative, tri};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::sync::Arc;

/// Degree and order of a real spherical harmonic on `S^2`.
///
/// Coefficients are stored at position `k² + k + m`: degree-major, order
/// running from `−k` to `k`. Order `m > 0` is the `cos mψ` harmonic and
/// `m < 0` the `sin |m|ψ` harmonic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub k: usize,
    pub m: i64,
}

impl HarmonicIndex {
    pub fn new(k: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > k {
            return Err(Error::InvalidParameter(format!(
                "|m| = {} exceeds k = {k}",
                m.abs()
            )));
        }
        Ok(HarmonicIndex { k, m })
    }

    pub fn position(&self) -> usize {
        position(self.k, self.m)
    }

    pub fn from_position(i: usize) -> Self {
        let k = (i as f64).sqrt() as usize;
        let k = if (k + 1) * (k + 1) <= i { k + 1 } else { k };
        HarmonicIndex {
            k,
            m: i as i64 - (k * k + k) as i64,
        }
    }
}

fn position(k: usize, m: i64) -> usize {
    ((k * k + k) as i64 + m) as usize
}

/// Point values of a real function on a quadrature grid.
#[derive(Clone, Debug)]
pub struct GridField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value at node {i}"
            )));
        }
        Ok(GridField { grid, values })
    }

    pub fn constant(grid: &Arc<SphereGrid>, c: f64) -> Self {
        GridField {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Sample `f` at every node.
    pub fn sample<F: SphereFn + ?Sized>(grid: &Arc<SphereGrid>, f: &F) -> Self {
        let values = grid.nodes().iter().map(|x| f.value(x)).collect();
        GridField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(GridField {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn check_same_grid(&self, other: &GridField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.descriptor() == other.grid.descriptor()
        {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid.descriptor(),
                other.grid.descriptor()
            )))
        }
    }

    /// `∫ f`.
    pub fn integral(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// `⨍ f = ∫ f / ω_n`.
    pub fn mean(&self) -> f64 {
        self.integral() / self.grid.total_weight()
    }

    /// `∫ f g`.
    pub fn inner(&self, other: &GridField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum())
    }

    /// `(∫ f²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `∫ x f(x)`, an ambient vector.
    pub fn first_moment(&self) -> Point {
        let mut m = ZERO;
        for ((x, w), v) in self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
        {
            for i in 0..4 {
                m[i] += w * v * x[i];
            }
        }
        m
    }

    pub fn snapshot(&self) -> GridFieldSnapshot {
        GridFieldSnapshot {
            grid: self.grid.descriptor().clone(),
            values: self.values.clone(),
        }
    }

    pub fn from_snapshot(s: &GridFieldSnapshot) -> Result<Self> {
        GridField::new(SphereGrid::new(s.grid.clone())?, s.values.clone())
    }
}

/// Serialized form of a [`GridField`]: `{"grid":{...},"values":[...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridFieldSnapshot {
    pub grid: GridDescriptor,
    pub values: Vec<f64>,
}

/// Real orthonormal spherical-harmonic coefficients of a function on `S^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    lmax: usize,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(lmax: usize) -> Self {
        SpectralField {
            lmax,
            coeffs: vec![0.0; (lmax + 1) * (lmax + 1)],
        }
    }

    pub fn from_coeffs(lmax: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != (lmax + 1) * (lmax + 1) {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for lmax {lmax}",
                coeffs.len()
            )));
        }
        Ok(SpectralField { lmax, coeffs })
    }

    /// The constant function `c`.
    pub fn constant(lmax: usize, c: f64) -> Self {
        let mut f = Self::zeros(lmax);
        f.coeffs[0] = c * (4.0 * std::f64::consts::PI).sqrt();
        f
    }

    /// A single unit-norm harmonic `Y_k^m`.
    pub fn harmonic(lmax: usize, k: usize, m: i64) -> Self {
        let mut f = Self::zeros(lmax.max(k));
        f.set(k, m, 1.0);
        f
    }

    /// Random coefficients uniform in `[−1, 1]`, scaled by `(1+k)^{−decay}`,
    /// restricted to degrees in `kmin..=lmax`.
    pub fn random<R: Rng>(rng: &mut R, lmax: usize, kmin: usize, decay: f64) -> Self {
        let mut f = Self::zeros(lmax);
        for k in kmin..=lmax {
            let s = (1.0 + k as f64).powf(-decay);
            for m in -(k as i64)..=k as i64 {
                f.set(k, m, s * rng.gen_range(-1.0..1.0));
            }
        }
        f
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: usize, m: i64) -> f64 {
        if k > self.lmax {
            0.0
        } else {
            self.coeffs[position(k, m)]
        }
    }

    pub fn set(&mut self, k: usize, m: i64, v: f64) {
        assert!(k <= self.lmax && m.unsigned_abs() as usize <= k);
        self.coeffs[position(k, m)] = v;
    }

    /// Coefficients of degree `k` (orders `−k..=k`).
    pub fn degree(&self, k: usize) -> &[f64] {
        &self.coeffs[k * k..(k + 1) * (k + 1)]
    }

    /// Multiply every degree-`k` block by `f(k)`.
    pub fn scale_degrees(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for k in 0..=self.lmax {
            let s = f(k);
            for c in &mut out.coeffs[k * k..(k + 1) * (k + 1)] {
                *c *= s;
            }
        }
        out
    }

    /// Copy into band limit `lmax`, truncating or zero-padding.
    pub fn with_lmax(&self, lmax: usize) -> Self {
        let mut out = Self::zeros(lmax);
        let n = (lmax.min(self.lmax) + 1).pow(2);
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralField {
            lmax: self.lmax,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s·other`, at the larger band limit.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> Self {
        let mut out = self.with_lmax(self.lmax.max(other.lmax));
        for (o, c) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += s * c;
        }
        out
    }

    /// `∫ f g` via Parseval.
    pub fn dot(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Largest degree with a coefficient above `tol` in magnitude.
    pub fn effective_degree(&self, tol: f64) -> usize {
        (0..=self.lmax)
            .rev()
            .find(|&k| self.degree(k).iter().any(|c| c.abs() > tol))
            .unwrap_or(0)
    }

    /// Keep only even degrees (the antipodally symmetric part).
    pub fn even_part(&self) -> Self {
        self.scale_degrees(|k| if k % 2 == 0 { 1.0 } else { 0.0 })
    }

    pub fn snapshot(&self, sigma: f64) -> SpectralSnapshot {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for k in 0..=self.lmax {
            for m in -(k as i64)..=k as i64 {
                coeffs.push((k, m, self.get(k, m)));
            }
        }
        SpectralSnapshot {
            n: 2,
            sigma,
            lmax: self.lmax,
            coeffs,
        }
    }

    pub fn from_snapshot(s: &SpectralSnapshot) -> Result<Self> {
        if s.n != 2 {
            return Err(Error::UnsupportedDimension(s.n));
        }
        let mut f = Self::zeros(s.lmax);
        for &(k, m, v) in &s.coeffs {
            HarmonicIndex::new(k, m)?;
            if k > s.lmax {
                return Err(Error::InvalidParameter(format!(
                    "degree {k} above lmax {}",
                    s.lmax
                )));
            }
            f.set(k, m, v);
        }
        Ok(f)
    }

    fn eval_with_table(&self, p: &[f64], cos_sin: &[(f64, f64)]) -> f64 {
        let mut v = 0.0;
        for k in 0..=self.lmax {
            v += self.get(k, 0) * p[tri(k, 0)];
        }
        v *= cos_sin[0].0;
        let mut acc = 0.0;
        for (m, &(c, s)) in cos_sin.iter().enumerate().skip(1) {
            let (mut a, mut b) = (0.0, 0.0);
            for k in m..=self.lmax {
                let pk = p[tri(k, m)];
                a += self.coeffs[position(k, m as i64)] * pk;
                b += self.coeffs[position(k, -(m as i64))] * pk;
            }
            acc += a * c + b * s;
        }
        v + SQRT_2 * acc
    }
}

fn angles(x: &Point) -> (f64, f64, f64) {
    let st = x[0].hypot(x[1]);
    let ct = x[2];
    let psi = x[1].atan2(x[0]);
    (ct, st, psi)
}

fn trig(lmax: usize, psi: f64) -> Vec<(f64, f64)> {
    (0..=lmax)
        .map(|m| ((m as f64 * psi).cos(), (m as f64 * psi).sin()))
        .collect()
}

impl SphereFn for SpectralField {
    fn value(&self, x: &Point) -> f64 {
        let (ct, st, psi) = angles(x);
        let mut p = vec![0.0; tri(self.lmax, self.lmax) + 1];
        legendre_table(ct, st, self.lmax, &mut p);
        self.eval_with_table(&p, &trig(self.lmax, psi))
    }

    fn gradient(&self, x: &Point, n: usize) -> Point {
        let (ct, st, psi) = angles(x);
        if st < 1e-6 {
            return numeric_gradient(self, x, n);
        }
        let len = tri(self.lmax, self.lmax) + 1;
        let mut p = vec![0.0; len];
        let mut dp = vec![0.0; len];
        legendre_with_derivative(ct, st, self.lmax, &mut p, &mut dp);
        let cs = trig(self.lmax, psi);
        let v_theta = self.eval_with_table(&dp, &cs);
        // ∂ψ of cos mψ is −m sin mψ, of sin mψ is m cos mψ
        let dcs: Vec<(f64, f64)> = cs
            .iter()
            .enumerate()
            .map(|(m, &(c, s))| (-(m as f64) * s, m as f64 * c))
            .collect();
        let v_psi = self.eval_with_table(&p, &dcs);
        let (sp, cp) = psi.sin_cos();
        let e_theta = [ct * cp, ct * sp, -st, 0.0];
        let e_psi = [-sp, cp, 0.0, 0.0];
        let g = v_psi / st;
        [
            v_theta * e_theta[0] + g * e_psi[0],
            v_theta * e_theta[1] + g * e_psi[1],
            v_theta * e_theta[2],
            0.0,
        ]
    }
}

/// Serialized form of a [`SpectralField`]:
/// `{"n":2,"sigma":σ,"lmax":L,"coeffs":[[k,m,value],...]}` in storage order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectralSnapshot {
    pub n: usize,
    pub sigma: f64,
    pub lmax: usize,
    pub coeffs: Vec<(usize, i64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::point::normalize;
    use crate::sphere::{sht_forward, sht_inverse};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn index_round_trip() {
        for i in 0..500 {
            let h = HarmonicIndex::from_position(i);
            assert!(h.m.unsigned_abs() as usize <= h.k);
            assert_eq!(h.position(), i);
        }
        assert!(HarmonicIndex::new(1, 2).is_err());
    }

    #[test]
    fn point_evaluation_matches_grid_synthesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpectralField::random(&mut rng, 12, 0, 0.5);
        let g = SphereGrid::s2_for_lmax(12).unwrap();
        let gf = sht_inverse(&f, &g).unwrap();
        for (x, v) in g.nodes().iter().zip(gf.values()) {
            assert!((f.value(x) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let x = normalize(&[0.2, -0.5, 0.7, 0.0]);
        let y10 = SpectralField::harmonic(3, 1, 0);
        assert!((y10.value(&x) - (3.0 / (4.0 * PI)).sqrt() * x[2]).abs() < 1e-14);
        let y11 = SpectralField::harmonic(3, 1, 1);
        assert!((y11.value(&x) - (3.0 / (4.0 * PI)).sqrt() * x[0]).abs() < 1e-14);
        let y1m1 = SpectralField::harmonic(3, 1, -1);
        assert!((y1m1.value(&x) - (3.0 / (4.0 * PI)).sqrt() * x[1]).abs() < 1e-14);
        let y20 = SpectralField::harmonic(2, 2, 0);
        let want = (5.0 / (16.0 * PI)).sqrt() * (3.0 * x[2] * x[2] - 1.0);
        assert!((y20.value(&x) - want).abs() < 1e-14);
    }

    #[test]
    fn analytic_gradient_matches_numeric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = SpectralField::random(&mut rng, 10, 0, 0.0);
        for x in [
            [0.3, 0.4, 0.866, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ] {
            let x = normalize(&x);
            let a = f.gradient(&x, 2);
            let b = numeric_gradient(&f, &x, 2);
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-7, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn snapshots_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = SpectralField::random(&mut rng, 4, 0, 1.0);
        let s = serde_json::to_string(&f.snapshot(0.5)).unwrap();
        assert!(s.starts_with("{\"n\":2,\"sigma\":0.5,\"lmax\":4,\"coeffs\":[[0,0,"));
        let back: SpectralSnapshot = serde_json::from_str(&s).unwrap();
        assert_eq!(SpectralField::from_snapshot(&back).unwrap(), f);

        let g = SphereGrid::s2(4, 8).unwrap();
        let gf = sht_inverse(&f, &g).unwrap();
        let s = serde_json::to_string(&gf.snapshot()).unwrap();
        assert!(s.starts_with("{\"grid\":{\"n\":2,\"polar\":4,\"azimuthal\":8},\"values\":["));
        let back = GridField::from_snapshot(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.values(), gf.values());
    }

    #[test]
    fn grid_field_validation() {
        let g = SphereGrid::s2(4, 8).unwrap();
        assert!(GridField::new(g.clone(), vec![0.0; 3]).is_err());
        let mut v = vec![0.0; g.len()];
        v[2] = f64::NAN;
        assert!(GridField::new(g, v).is_err());
    }

    #[test]
    fn constant_field_coefficient() {
        let g = SphereGrid::s2(8, 16).unwrap();
        let one = GridField::constant(&g, 1.0);
        let c = sht_forward(&one, 7).unwrap();
        assert!((c.get(0, 0) - (4.0 * PI).sqrt()).abs() < 1e-13);
        assert!(c.coeffs()[1..].iter().all(|x| x.abs() < 1e-13));
    }
}

use super::moment::{g_map, MomentRule};
use super::triangulation::{Triangulation, TriangulationDescriptor};
use crate::sphere::point::{dot, norm, normalize, scale, Point};
use crate::sphere::SphereFn;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    /// Summed signed solid angles of the image triangles (`n = 2` only).
    Area,
    /// Signed count of simplices whose image cone contains a generic direction.
    Preimage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub n: usize,
    /// Radius of the evaluation sphere in the ball.
    pub s: f64,
    pub t: f64,
    pub triangulation: TriangulationDescriptor,
    pub method: DegreeMethod,
    /// `None` when zero exclusion fails.
    pub degree: Option<i64>,
    /// Unrounded degree: area sum over `|S^n|`, or the signed count.
    pub raw: f64,
    /// Smallest `|G|` over the vertices.
    pub min_norm: f64,
    /// Largest change of `G` under quadrature refinement on sampled vertices.
    pub error_estimate: f64,
    pub threshold: f64,
}

impl DegreeResult {
    pub fn is_conclusive(&self) -> bool {
        self.degree.is_some()
    }
}

const TARGETS: [[f64; 4]; 3] = [
    [0.3141, -0.5926, 0.5358, 0.2793],
    [-0.7071, 0.1111, 0.4142, -0.3183],
    [0.1618, 0.6931, -0.2718, 0.5772],
];

fn check_small(images: &[Point], s: &[usize]) -> Result<()> {
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if dot(&images[s[i]], &images[s[j]]) <= 0.0 {
                return Err(Error::RefinementRequired(
                    "an image simplex spans more than a right angle".into(),
                ));
            }
        }
    }
    Ok(())
}

fn area_degree(tri: &Triangulation, images: &[Point]) -> Result<f64> {
    if tri.dim() != 2 {
        return Err(Error::UnsupportedDimension(tri.dim()));
    }
    let mut total = 0.0;
    for s in tri.simplices() {
        check_small(images, s)?;
        let (a, b, c) = (&images[s[0]], &images[s[1]], &images[s[2]]);
        let triple = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
        total += 2.0 * triple.atan2(1.0 + dot(a, b) + dot(b, c) + dot(c, a));
    }
    Ok(total / (4.0 * PI))
}

fn preimage_count(tri: &Triangulation, images: &[Point], target: &Point) -> Result<Option<i64>> {
    let d = tri.dim() + 1;
    let y = DVector::from_iterator(d, target[..d].iter().cloned());
    let mut count = 0;
    for s in tri.simplices() {
        check_small(images, s)?;
        let m = DMatrix::from_fn(d, d, |i, j| images[s[j]][i]);
        let lu = m.clone().lu();
        let Some(lam) = lu.solve(&y) else { continue };
        let scale = lam.iter().map(|x| x.abs()).sum::<f64>();
        let tol = 1e-12 * scale;
        // target on the boundary of an image cone
        if lam.iter().all(|&x| x > -tol) && lam.iter().any(|&x| x < tol) {
            return Ok(None);
        }
        if lam.iter().all(|&x| x > 0.0) {
            count += if lu.determinant() > 0.0 { 1 } else { -1 };
        }
    }
    Ok(Some(count))
}

fn degree_from_images(
    tri: &Triangulation,
    images: &[Point],
    method: DegreeMethod,
) -> Result<(i64, f64)> {
    let images: Vec<Point> = images.iter().map(normalize).collect();
    match method {
        DegreeMethod::Area => {
            let raw = area_degree(tri, &images)?;
            let r = raw.round();
            if (raw - r).abs() > 1e-6 {
                return Err(Error::RefinementRequired(format!(
                    "accumulated area {raw} is not an integer"
                )));
            }
            Ok((r as i64, raw))
        }
        DegreeMethod::Preimage => {
            let mut found = Vec::new();
            for t in &TARGETS {
                let mut y = [0.0; 4];
                y[..=tri.dim()].copy_from_slice(&t[..=tri.dim()]);
                if let Some(c) = preimage_count(tri, &images, &normalize(&y))? {
                    found.push(c);
                }
                if found.len() == 2 {
                    break;
                }
            }
            match found[..] {
                [a, b] if a == b => Ok((a, a as f64)),
                [a, b] => Err(Error::RefinementRequired(format!(
                    "preimage counts {a} and {b} disagree"
                ))),
                _ => Err(Error::RefinementRequired(
                    "no generic target direction".into(),
                )),
            }
        }
    }
}

/// Degree of `f: S^n → R^{n+1} \ {0}` on the triangulated unit sphere.
pub fn map_degree(
    f: impl Fn(&Point) -> Point,
    tri: &Triangulation,
    method: DegreeMethod,
) -> Result<i64> {
    let images: Vec<Point> = tri.vertices().iter().map(&f).collect();
    if images.iter().any(|g| !(norm(g) > 0.0)) {
        return Err(Error::Undefined("map vanishes at a vertex".into()));
    }
    Ok(degree_from_images(tri, &images, method)?.0)
}

/// Degree of `p ↦ G(p/|p|, 1/(1−|p|))` on the sphere `|p| = s` of the ball.
///
/// Zero exclusion: `min |G|` over the vertices must exceed ten times the
/// change of `G` under quadrature refinement (measured on a sample of
/// vertices) and `1e−10·sup|K|`; otherwise the result carries no degree.
pub fn brouwer_degree<F: SphereFn + ?Sized>(
    k: &F,
    s: f64,
    tri: &Triangulation,
    rule: &MomentRule,
    method: DegreeMethod,
) -> Result<DegreeResult> {
    let n = tri.dim();
    if rule.dim() != n {
        return Err(Error::InvalidParameter(
            "rule and triangulation dimensions differ".into(),
        ));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {s} must be in (0, 1)"
        )));
    }
    let t = 1.0 / (1.0 - s);
    let images = tri
        .vertices()
        .iter()
        .map(|p| g_map(k, p, t, rule))
        .collect::<Result<Vec<_>>>()?;
    let min_norm = images.iter().map(norm).fold(f64::INFINITY, f64::min);
    let fine = rule.refined()?;
    let stride = (tri.vertices().len() / 24).max(1);
    let mut error_estimate = 0.0f64;
    let mut sup_k = 0.0f64;
    for (p, g) in tri.vertices().iter().zip(&images).step_by(stride) {
        let gf = g_map(k, p, t, &fine)?;
        error_estimate = error_estimate.max(norm(&crate::sphere::point::sub(&gf, g)));
        sup_k = sup_k
            .max(k.value(p).abs())
            .max(k.value(&scale(p, -1.0)).abs());
    }
    let threshold = (10.0 * error_estimate).max(1e-10 * sup_k);
    let mut result = DegreeResult {
        n,
        s,
        t,
        triangulation: tri.descriptor(),
        method,
        degree: None,
        raw: f64::NAN,
        min_norm,
        error_estimate,
        threshold,
    };
    if min_norm > threshold {
        let (d, raw) = degree_from_images(tri, &images, method)?;
        result.degree = Some(d);
        result.raw = raw;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    fn both(n: usize) -> Vec<DegreeMethod> {
        if n == 2 {
            vec![DegreeMethod::Area, DegreeMethod::Preimage]
        } else {
            vec![DegreeMethod::Preimage]
        }
    }

    #[test]
    fn synthetic_maps() {
        for n in [2, 3] {
            let tri = Triangulation::cube_sphere(n, if n == 2 { 6 } else { 3 }).unwrap();
            for m in both(n) {
                assert_eq!(map_degree(|p| *p, &tri, m).unwrap(), 1);
                let sign = if n == 2 { -1 } else { 1 };
                assert_eq!(map_degree(|p| scale(p, -1.0), &tri, m).unwrap(), sign);
                let refl = |p: &Point| [-p[0], p[1], p[2], p[3]];
                assert_eq!(map_degree(refl, &tri, m).unwrap(), -1);
                let constant = |p: &Point| [1.0 + 0.1 * p[0], 0.05 * p[1], 0.0, 0.0];
                assert_eq!(map_degree(constant, &tri, m).unwrap(), 0);
            }
        }
    }

    #[test]
    fn squared_map_has_degree_two() {
        // (z, h) ↦ (z²/|z|, h) on S² after normalization
        let tri = Triangulation::cube_sphere(2, 16).unwrap();
        let f = |p: &Point| {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt().max(1e-300);
            [
                (p[0] * p[0] - p[1] * p[1]) / r,
                2.0 * p[0] * p[1] / r,
                p[2],
                0.0,
            ]
        };
        for m in both(2) {
            assert_eq!(map_degree(f, &tri, m).unwrap(), 2);
        }
    }

    #[test]
    fn constant_curvature_is_inconclusive() {
        let tri = Triangulation::cube_sphere(2, 4).unwrap();
        let rule = MomentRule::default_for(2).unwrap();
        let r = brouwer_degree(
            &Preset::Const { c: 1.0 },
            0.9,
            &tri,
            &rule,
            DegreeMethod::Area,
        )
        .unwrap();
        assert!(!r.is_conclusive() && r.min_norm < r.threshold);
    }

    #[test]
    fn tilt_has_degree_zero() {
        let tri = Triangulation::cube_sphere(2, 8).unwrap();
        let rule = MomentRule::default_for(2).unwrap();
        let k = Preset::Tilt { n: 2, eps: 0.1 };
        for m in both(2) {
            let r = brouwer_degree(&k, 0.9, &tri, &rule, m).unwrap();
            assert_eq!(r.degree, Some(0), "{r:?}");
            assert!((r.t - 10.0).abs() < 1e-12);
        }
    }
}

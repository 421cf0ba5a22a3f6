use super::point::Point;
use super::quadrature::{gauss_chebyshev2, gauss_legendre};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Resolution of a product grid.
///
/// For `n = 2`: `polar` Gauss–Legendre rings in `cos θ` times `azimuthal`
/// equispaced longitudes. For `n = 3` the extra `radial` count gives the
/// Gauss–Chebyshev rule in the fourth coordinate `cos χ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub n: usize,
    pub polar: usize,
    pub azimuthal: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<usize>,
}

/// Quadrature nodes and weights on `S^n`, `n ∈ {2, 3}`.
///
/// Node ordering is ring-major: for `n = 2` node `i·azimuthal + j` sits at
/// polar ring `i` (θ increasing) and longitude `ψ_j = 2πj/azimuthal`; for
/// `n = 3` the `cos χ` index is outermost.
#[derive(Debug)]
pub struct SphereGrid {
    desc: GridDescriptor,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    cos_theta: Vec<f64>,
    polar_weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(desc: GridDescriptor) -> Result<Arc<Self>> {
        match desc.n {
            2 => Self::s2(desc.polar, desc.azimuthal),
            3 => Self::s3(
                desc.radial.unwrap_or(desc.polar),
                desc.polar,
                desc.azimuthal,
            ),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    /// Gauss–Legendre × trapezoid grid on `S^2`. Integrates every spherical
    /// harmonic of degree `≤ min(2·polar − 1, azimuthal − 1)` exactly.
    pub fn s2(polar: usize, azimuthal: usize) -> Result<Arc<Self>> {
        check_counts(polar, azimuthal)?;
        let (ct, wt) = gauss_legendre(polar);
        let dpsi = 2.0 * PI / azimuthal as f64;
        let mut nodes = Vec::with_capacity(polar * azimuthal);
        let mut weights = Vec::with_capacity(polar * azimuthal);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).sqrt();
            for j in 0..azimuthal {
                let psi = j as f64 * dpsi;
                nodes.push([s * psi.cos(), s * psi.sin(), *c, 0.0]);
                weights.push(w * dpsi);
            }
        }
        Ok(Arc::new(SphereGrid {
            desc: GridDescriptor {
                n: 2,
                polar,
                azimuthal,
                radial: None,
            },
            nodes,
            weights,
            cos_theta: ct,
            polar_weights: wt,
        }))
    }

    /// Smallest `S^2` grid whose transforms are exact up to degree `lmax`
    /// and whose quadrature is exact on products of two such fields.
    pub fn s2_for_lmax(lmax: usize) -> Result<Arc<Self>> {
        Self::s2(lmax + 1, 2 * lmax + 2)
    }

    /// Product grid on `S^3`: `x = (sin χ ω, cos χ)` with `ω ∈ S^2`.
    pub fn s3(radial: usize, polar: usize, azimuthal: usize) -> Result<Arc<Self>> {
        check_counts(polar, azimuthal)?;
        if radial < 1 {
            return Err(Error::InvalidResolution(format!("radial count {radial}")));
        }
        let inner = Self::s2(polar, azimuthal)?;
        let (u, wu) = gauss_chebyshev2(radial);
        let mut nodes = Vec::with_capacity(radial * inner.len());
        let mut weights = Vec::with_capacity(radial * inner.len());
        for (c, w) in u.iter().zip(&wu) {
            let s = (1.0 - c * c).sqrt();
            for (x, wi) in inner.nodes.iter().zip(&inner.weights) {
                nodes.push([s * x[0], s * x[1], s * x[2], *c]);
                weights.push(w * wi);
            }
        }
        Ok(Arc::new(SphereGrid {
            desc: GridDescriptor {
                n: 3,
                polar,
                azimuthal,
                radial: Some(radial),
            },
            nodes,
            weights,
            cos_theta: inner.cos_theta.clone(),
            polar_weights: inner.polar_weights.clone(),
        }))
    }

    pub fn dim(&self) -> usize {
        self.desc.n
    }

    pub fn descriptor(&self) -> &GridDescriptor {
        &self.desc
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn polar(&self) -> usize {
        self.desc.polar
    }

    pub fn azimuthal(&self) -> usize {
        self.desc.azimuthal
    }

    /// `cos θ` of each polar ring (decreasing).
    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    /// Gauss–Legendre weight of each polar ring (without the `2π/azimuthal` factor).
    pub fn polar_weights(&self) -> &[f64] {
        &self.polar_weights
    }

    /// Longitude of column `j`.
    pub fn psi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.desc.azimuthal as f64
    }

    /// Total weight, which equals the sphere volume.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest harmonic degree the quadrature integrates exactly (`n = 2`).
    pub fn exactness_degree(&self) -> usize {
        (2 * self.desc.polar - 1).min(self.desc.azimuthal - 1)
    }
}

fn check_counts(polar: usize, azimuthal: usize) -> Result<()> {
    if polar < 2 || azimuthal < 4 {
        return Err(Error::InvalidResolution(format!(
            "need polar ≥ 2 and azimuthal ≥ 4, got {polar}×{azimuthal}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::point::norm;

    #[test]
    fn s2_weights_and_nodes() {
        for (p, a) in [(32, 64), (2, 4), (7, 9)] {
            let g = SphereGrid::s2(p, a).unwrap();
            assert_eq!(g.len(), p * a);
            assert!((g.total_weight() - 4.0 * PI).abs() < 1e-12);
            assert!(g.nodes().iter().all(|x| (norm(x) - 1.0).abs() < 1e-14));
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn s3_weights() {
        let g = SphereGrid::s3(24, 24, 48).unwrap();
        assert!((g.total_weight() - 2.0 * PI * PI).abs() < 1e-10);
        assert!(g.nodes().iter().all(|x| (norm(x) - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SphereGrid::s2(1, 8).is_err());
        assert!(SphereGrid::s2(4, 3).is_err());
        let d = GridDescriptor {
            n: 4,
            polar: 4,
            azimuthal: 8,
            radial: None,
        };
        assert!(matches!(
            SphereGrid::new(d),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn moments() {
        let g = SphereGrid::s2(16, 32).unwrap();
        let q = |f: &dyn Fn(&Point) -> f64| -> f64 {
            g.nodes()
                .iter()
                .zip(g.weights())
                .map(|(x, w)| w * f(x))
                .sum()
        };
        assert!(q(&|x| x[2]).abs() < 1e-13);
        assert!((q(&|x| x[2] * x[2]) - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((q(&|x| x[0] * x[0]) - 4.0 * PI / 3.0).abs() < 1e-12);
        let g3 = SphereGrid::s3(8, 8, 16).unwrap();
        let m: f64 = g3
            .nodes()
            .iter()
            .zip(g3.weights())
            .map(|(x, w)| w * x[3] * x[3])
            .sum();
        assert!((m - PI * PI / 2.0).abs() < 1e-12);
    }
}

use crate::fracop::FracOperatorSpec;
use crate::sphere::point::{axpy, dot, norm, scale, Point, ZERO};
use crate::sphere::{sht_forward, GridField, SpectralField, SphereFn, SphereGrid};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The conformal dilation `φ_{P,t}`: `y ↦ t y` in stereographic coordinates
/// projected from the pole `P`. Identified with the ball point
/// `p = ((t−1)/t) P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamJson", into = "ParamJson")]
pub struct ConformalParam {
    n: usize,
    pole: Point,
    t: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamJson {
    #[serde(rename = "P")]
    pole: Vec<f64>,
    t: f64,
}

impl TryFrom<ParamJson> for ConformalParam {
    type Error = Error;
    fn try_from(j: ParamJson) -> Result<Self> {
        if !(3..=4).contains(&j.pole.len()) {
            return Err(Error::UnsupportedDimension(j.pole.len().saturating_sub(1)));
        }
        ConformalParam::new(
            j.pole.len() - 1,
            crate::sphere::point::from_slice(&j.pole),
            j.t,
        )
    }
}

impl From<ConformalParam> for ParamJson {
    fn from(c: ConformalParam) -> Self {
        ParamJson {
            pole: c.pole[..=c.n].to_vec(),
            t: c.t,
        }
    }
}

impl ConformalParam {
    /// `pole` must be a unit vector (checked to 1e−10) and `t ≥ 1`.
    pub fn new(n: usize, pole: Point, t: f64) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if (norm(&pole) - 1.0).abs() > 1e-10 || pole[n + 1..].iter().any(|&c| c != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pole {pole:?} is not a unit vector in R^{}",
                n + 1
            )));
        }
        if !(t >= 1.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dilation t = {t} must be ≥ 1"
            )));
        }
        Ok(ConformalParam {
            n,
            pole: scale(&pole, 1.0 / norm(&pole)),
            t,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut pole = ZERO;
        pole[n] = 1.0;
        ConformalParam { n, pole, t: 1.0 }
    }

    /// Parameter with ball point `p`, `|p| < 1`.
    pub fn from_ball(n: usize, p: &Point) -> Result<Self> {
        let s = norm(p);
        if s >= 1.0 || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("|p| = {s} must be < 1")));
        }
        if s == 0.0 {
            return Ok(Self::identity(n));
        }
        Self::new(n, scale(p, 1.0 / s), 1.0 / (1.0 - s))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pole(&self) -> Point {
        self.pole
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `s = (t−1)/t = |p|`.
    pub fn s(&self) -> f64 {
        (self.t - 1.0) / self.t
    }

    pub fn ball_point(&self) -> Point {
        scale(&self.pole, self.s())
    }

    /// `φ_{P,t}^{−1} = φ_{P,1/t} = φ_{−P,t}`.
    pub fn inverse(&self) -> Self {
        ConformalParam {
            n: self.n,
            pole: scale(&self.pole, -1.0),
            t: self.t,
        }
    }

    /// `|det dφ|^{(n−2σ)/(2n)} = (2t/D)^{(n−2σ)/2}` at `x`.
    pub fn weight_factor(&self, x: &Point, spec: &FracOperatorSpec) -> f64 {
        let c = dot(x, &self.pole);
        let d = (1.0 - c) + self.t * self.t * (1.0 + c);
        (2.0 * self.t / d).powf(spec.weight())
    }
}

/// Stereographic coordinates of `x` from the pole `P`, as a vector in `P^⊥`.
pub fn stereo_project(x: &Point, pole: &Point) -> Result<Point> {
    let c = dot(x, pole);
    if 1.0 - c < 1e-14 {
        return Err(Error::AtPole);
    }
    Ok(scale(&axpy(x, -c, pole), 1.0 / (1.0 - c)))
}

/// Inverse stereographic map `y ↦ (2y + (|y|²−1)P)/(1+|y|²)` together with
/// `|J| = (2/(1+|y|²))^n`.
pub fn stereo_lift(y: &Point, pole: &Point, n: usize) -> (Point, f64) {
    let r2 = dot(y, y);
    let x = scale(&axpy(&scale(y, 2.0), r2 - 1.0, pole), 1.0 / (1.0 + r2));
    (x, (2.0 / (1.0 + r2)).powi(n as i32))
}

/// `φ_{P,t}(x)` and `|det dφ_{P,t}(x)| = (2t/D)^n`, `D = (1−x·P) + t²(1+x·P)`.
pub fn phi_apply(param: &ConformalParam, x: &Point) -> (Point, f64) {
    let p = &param.pole;
    let t = param.t;
    let c = dot(x, p);
    let d = (1.0 - c) + t * t * (1.0 + c);
    let perp = axpy(x, -c, p);
    let along = t * t * (1.0 + c) - (1.0 - c);
    let y = scale(&axpy(&scale(&perp, 2.0 * t), along, p), 1.0 / d);
    (y, (2.0 * t / d).powi(param.n as i32))
}

/// `dφ_{P,t}(x)[v]` for a tangent vector `v` at `x`.
pub fn phi_differential(param: &ConformalParam, x: &Point, v: &Point) -> Point {
    let p = &param.pole;
    let t = param.t;
    let c = dot(x, p);
    let vp = dot(v, p);
    let d = (1.0 - c) + t * t * (1.0 + c);
    let num = axpy(
        &scale(&axpy(x, -c, p), 2.0 * t),
        t * t * (1.0 + c) - (1.0 - c),
        p,
    );
    let dnum = axpy(&scale(&axpy(v, -vp, p), 2.0 * t), (t * t + 1.0) * vp, p);
    let dd = (t * t - 1.0) * vp;
    axpy(&scale(&dnum, 1.0 / d), -dd / (d * d), &num)
}

/// `T_φ f` sampled on `grid`, evaluating `f` exactly at the mapped nodes.
pub fn pushforward_fn<F: SphereFn + ?Sized>(
    f: &F,
    param: &ConformalParam,
    grid: &Arc<SphereGrid>,
    spec: &FracOperatorSpec,
) -> GridField {
    let values = grid
        .nodes()
        .iter()
        .map(|x| {
            let (y, _) = phi_apply(param, x);
            f.value(&y) * param.weight_factor(x, spec)
        })
        .collect();
    GridField::new(grid.clone(), values).expect("finite pushforward")
}

/// Result of [`pushforward_t`] on sampled data.
#[derive(Clone, Debug)]
pub struct Pushforward {
    pub field: GridField,
    /// Whether the input was resolved by its harmonic expansion (top-degree
    /// coefficients below `1e−10` of the norm). When false the composition
    /// used a truncated expansion.
    pub band_limited: bool,
}

/// `T_φ v` for sampled `v` on `S^2`: `v` is expanded in harmonics at the
/// grid's full band limit and synthesized at the mapped nodes.
pub fn pushforward_t(
    v: &GridField,
    param: &ConformalParam,
    spec: &FracOperatorSpec,
) -> Result<Pushforward> {
    let g = v.grid();
    let lmax = (g.polar() - 1).min((g.azimuthal() - 1) / 2);
    let c = sht_forward(v, lmax)?;
    let band_limited = is_resolved(&c);
    Ok(Pushforward {
        field: pushforward_fn(&c, param, g, spec),
        band_limited,
    })
}

pub(crate) fn is_resolved(c: &SpectralField) -> bool {
    let l = c.lmax();
    let top: f64 = (l.saturating_sub(1)..=l)
        .map(|k| c.degree(k).iter().map(|x| x * x).sum::<f64>())
        .sum();
    top.sqrt() <= 1e-10 * c.l2_norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::point::{basis, normalize, sub};
    use proptest::prelude::*;

    fn unit(v: [f64; 3]) -> Point {
        normalize(&[v[0], v[1], v[2], 0.0])
    }

    #[test]
    fn stereo_special_points() {
        let p = basis(2);
        let (x, j) = stereo_lift(&ZERO, &p, 2);
        assert!(norm(&sub(&x, &scale(&p, -1.0))) < 1e-15);
        assert!((j - 4.0).abs() < 1e-15);
        let (x, _) = stereo_lift(&[1.0, 0.0, 0.0, 0.0], &p, 2);
        assert!(dot(&x, &p).abs() < 1e-15);
        assert!(matches!(stereo_project(&p, &p), Err(Error::AtPole)));
    }

    #[test]
    fn identity_and_fixed_points() {
        let id = ConformalParam::identity(2);
        let x = unit([0.3, -0.4, 0.5]);
        let (y, j) = phi_apply(&id, &x);
        assert!(norm(&sub(&x, &y)) < 1e-15 && (j - 1.0).abs() < 1e-15);
        let c = ConformalParam::new(2, basis(2), 2.0).unwrap();
        let s = scale(&basis(2), -1.0);
        let (y, _) = phi_apply(&c, &s);
        assert!(norm(&sub(&y, &s)) < 1e-15);
        let (y, _) = phi_apply(&c, &basis(2));
        assert!(norm(&sub(&y, &basis(2))) < 1e-15);
    }

    #[test]
    fn jacobian_integrates_to_volume() {
        let g = SphereGrid::s2(64, 128).unwrap();
        for t in [1.5, 2.0, 4.0] {
            let c = ConformalParam::new(2, unit([0.2, 0.5, -0.3]), t).unwrap();
            let q: f64 = g
                .nodes()
                .iter()
                .zip(g.weights())
                .map(|(x, w)| w * phi_apply(&c, x).1)
                .sum();
            assert!((q - 4.0 * std::f64::consts::PI).abs() < 1e-8, "t={t}: {q}");
        }
        let g3 = SphereGrid::s3(48, 48, 96).unwrap();
        let c = ConformalParam::new(3, normalize(&[0.2, 0.5, -0.3, 0.4]), 2.0).unwrap();
        let q: f64 = g3
            .nodes()
            .iter()
            .zip(g3.weights())
            .map(|(x, w)| w * phi_apply(&c, x).1)
            .sum();
        assert!((q - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-8, "{q}");
    }

    #[test]
    fn param_json() {
        let c = ConformalParam::new(2, basis(0), 3.0).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"P":[1.0,0.0,0.0],"t":3.0}"#);
        let back: ConformalParam = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<ConformalParam>(r#"{"P":[1.0,1.0,0.0],"t":3.0}"#).is_err());
        assert!(serde_json::from_str::<ConformalParam>(r#"{"P":[1.0,0.0,0.0],"t":0.5}"#).is_err());
    }

    #[test]
    fn ball_parametrization() {
        let p = [0.0, 0.0, 0.5, 0.0];
        let c = ConformalParam::from_ball(2, &p).unwrap();
        assert!((c.t() - 2.0).abs() < 1e-15);
        assert!(norm(&sub(&c.ball_point(), &p)) < 1e-15);
        assert!(ConformalParam::from_ball(2, &[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn group_law(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
                     t1 in 1.0f64..5.0, t2 in 1.0f64..5.0,
                     x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
            prop_assume!(a * a + b * b + c * c > 0.01 && x0 * x0 + x1 * x1 + x2 * x2 > 0.01);
            let p = unit([a, b, c]);
            let x = unit([x0, x1, x2]);
            let f1 = ConformalParam::new(2, p, t1).unwrap();
            let f2 = ConformalParam::new(2, p, t2).unwrap();
            let f12 = ConformalParam::new(2, p, t1 * t2).unwrap();
            let (y2, j2) = phi_apply(&f2, &x);
            let (y, j1) = phi_apply(&f1, &y2);
            let (z, j12) = phi_apply(&f12, &x);
            prop_assert!(norm(&sub(&y, &z)) < 1e-12);
            prop_assert!((j1 * j2 - j12).abs() < 1e-12 * j12.max(1.0));
            let (back, _) = phi_apply(&f1.inverse(), &y);
            prop_assert!(norm(&sub(&back, &y2)) < 1e-12);
        }

        #[test]
        fn stereo_round_trip(x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0, x3 in -1.0f64..1.0) {
            let x = normalize(&[x0, x1, x2, x3]);
            let p = normalize(&[0.1, 0.2, -0.3, 0.9]);
            prop_assume!(dot(&x, &p) < 0.999);
            let y = stereo_project(&x, &p).unwrap();
            let (z, _) = stereo_lift(&y, &p, 3);
            prop_assert!(norm(&sub(&x, &z)) < 1e-13);
        }

        #[test]
        fn differential_is_conformal(x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0, t in 1.0f64..6.0) {
            let x = unit([x0, x1, x2]);
            prop_assume!(norm(&[x0, x1, x2, 0.0]) > 0.1);
            let c = ConformalParam::new(2, unit([0.3, -0.1, 0.8]), t).unwrap();
            let j = phi_apply(&c, &x).1;
            let frame = crate::sphere::point::complement_frame(&x, 2);
            let d0 = phi_differential(&c, &x, &frame[0]);
            let d1 = phi_differential(&c, &x, &frame[1]);
            let scale2 = j; // conformal factor squared equals the n=2 Jacobian
            prop_assert!((dot(&d0, &d0) - scale2).abs() < 1e-10 * scale2.max(1.0));
            prop_assert!((dot(&d1, &d1) - scale2).abs() < 1e-10 * scale2.max(1.0));
            prop_assert!(dot(&d0, &d1).abs() < 1e-10 * scale2.max(1.0));
            // finite-difference check of the differential
            let h = 1e-6;
            let xp = normalize(&axpy(&x, h, &frame[0]));
            let xm = normalize(&axpy(&x, -h, &frame[0]));
            let fd = scale(&sub(&phi_apply(&c, &xp).0, &phi_apply(&c, &xm).0), 0.5 / h);
            prop_assert!(norm(&sub(&fd, &d0)) < 1e-6 * (1.0 + norm(&d0)));
        }
    }
}

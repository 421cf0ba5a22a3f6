use crate::fracop::FracOperatorSpec;
use crate::sphere::point::{axpy, complement_frame, dot, norm, scale, ZERO};
use crate::sphere::{sphere_volume, Point, SphereFn, SphereGrid};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Product rule for integrals over `S^n` in coordinates adapted to a pole
/// `P`: `x = sech(u)·ω − tanh(u)·P`, `ω ∈ S^{n−1} ⊥ P`, so that
/// `dx = sech^n(u) du dω` and `φ_{P,t}` acts as the shift `u ↦ u − ln t`.
/// The `u` integral uses the trapezoid rule, which converges geometrically
/// for the analytic, exponentially decaying integrands that arise here.
#[derive(Clone, Debug)]
pub struct MomentRule {
    n: usize,
    step: f64,
    us: Vec<f64>,
    /// Directions as coefficients in the frame complementing `P`, with weights.
    dirs: Vec<([f64; 3], f64)>,
    omega_resolution: usize,
}

impl MomentRule {
    /// `omega_resolution` is the number of azimuthal nodes for `n = 2` and
    /// the number of polar rings of the `S²` factor for `n = 3`.
    pub fn new(n: usize, step: f64, omega_resolution: usize) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::InvalidResolution(format!(
                "step {step} must be in (0, 1]"
            )));
        }
        let dirs = match n {
            2 => {
                if omega_resolution < 4 {
                    return Err(Error::InvalidResolution(
                        "at least 4 azimuthal nodes".into(),
                    ));
                }
                let w = 2.0 * PI / omega_resolution as f64;
                (0..omega_resolution)
                    .map(|j| {
                        let (s, c) = (2.0 * PI * j as f64 / omega_resolution as f64).sin_cos();
                        ([c, s, 0.0], w)
                    })
                    .collect()
            }
            3 => {
                let g = SphereGrid::s2(omega_resolution, 2 * omega_resolution)?;
                g.nodes()
                    .iter()
                    .zip(g.weights())
                    .map(|(x, &w)| ([x[0], x[1], x[2]], w))
                    .collect()
            }
            _ => return Err(Error::UnsupportedDimension(n)),
        };
        let umax = 40.0 / n as f64;
        let k = (umax / step).ceil() as i64;
        let us = (-k..=k).map(|i| i as f64 * step).collect();
        Ok(MomentRule {
            n,
            step,
            us,
            dirs,
            omega_resolution,
        })
    }

    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            2 => Self::new(2, 0.2, 64),
            _ => Self::new(n, 0.2, 12),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn omega_resolution(&self) -> usize {
        self.omega_resolution
    }

    pub fn len(&self) -> usize {
        self.us.len() * self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Halved step and doubled angular resolution, for error estimates.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n, self.step / 2.0, 2 * self.omega_resolution)
    }

    /// Visit every node of the rule adapted to `(P, t)`.
    fn visit(&self, pole: &Point, t: f64, mut f: impl FnMut(&Node)) {
        let frame = complement_frame(pole, self.n);
        let shift = t.ln();
        for &u in &self.us {
            let (su, tu) = (1.0 / u.cosh(), u.tanh());
            let up = u - shift;
            let (sv, tv) = (1.0 / up.cosh(), up.tanh());
            let wu = self.step * su.powi(self.n as i32);
            for (c, wd) in &self.dirs {
                let mut om = ZERO;
                for (ci, e) in c.iter().zip(&frame) {
                    om = axpy(&om, *ci, e);
                }
                let x = axpy(&scale(&om, su), -tu, pole);
                let y = axpy(&scale(&om, sv), -tv, pole);
                let ex = axpy(&scale(&om, -tu), -su, pole);
                let ey = axpy(&scale(&om, -tv), -sv, pole);
                f(&Node {
                    x,
                    y,
                    ex,
                    ey,
                    stretch: up.cosh() * su,
                    weight: wu * wd,
                });
            }
        }
    }
}

struct Node {
    x: Point,
    /// `φ_{P,t}(x)`
    y: Point,
    /// Unit polar directions at `x` and `y`.
    ex: Point,
    ey: Point,
    /// `1/|dφ|` at `x`
    stretch: f64,
    weight: f64,
}

fn check_args(pole: &Point, t: f64, rule: &MomentRule) -> Result<()> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t = {t} must be ≥ 1")));
    }
    if (norm(pole) - 1.0).abs() > 1e-12 || pole[rule.n + 1..].iter().any(|&c| c != 0.0) {
        return Err(Error::InvalidParameter(
            "P must be a unit vector in R^{n+1}".into(),
        ));
    }
    Ok(())
}

/// `G(P,t) = ⨍ K∘φ_{P,t}(x) x dx`.
pub fn g_map<F: SphereFn + ?Sized>(
    k: &F,
    pole: &Point,
    t: f64,
    rule: &MomentRule,
) -> Result<Point> {
    check_args(pole, t, rule)?;
    let mut g = ZERO;
    rule.visit(pole, t, |q| g = axpy(&g, q.weight * k.value(&q.y), &q.x));
    Ok(scale(&g, 1.0 / sphere_volume(rule.n)))
}

/// `A(P,t) = (1/n) ⨍ ⟨∇(K∘φ_{P,t}), ∇x⟩ |w|^{2n/(n−2σ)}`, with `w ≡ 1` when
/// no weight is given. The gradient of `K∘φ` is obtained from `∇K` at
/// `φ(x)` through the conformal differential.
pub fn a_map<F, W>(
    k: &F,
    pole: &Point,
    t: f64,
    w: Option<&W>,
    spec: &FracOperatorSpec,
    rule: &MomentRule,
) -> Result<Point>
where
    F: SphereFn + ?Sized,
    W: SphereFn + ?Sized,
{
    check_args(pole, t, rule)?;
    if spec.n != rule.n {
        return Err(Error::InvalidParameter(
            "rule and operator dimensions differ".into(),
        ));
    }
    let n = rule.n;
    let q = spec.critical_exponent();
    let mut a = ZERO;
    rule.visit(pole, t, |node| {
        let g = k.gradient(&node.y, n);
        let gy = dot(&g, &node.ey);
        let rest = axpy(&axpy(&g, -gy, &node.ey), -dot(&g, &node.y), &node.y);
        let grad = scale(&axpy(&rest, gy, &node.ex), 1.0 / node.stretch);
        let wt = w.map_or(1.0, |w| w.value(&node.x).abs().powf(q));
        // ⟨∇f, ∇x_i⟩ = ⟨∇f, e_i⟩ for tangential ∇f
        a = axpy(&a, node.weight * wt, &grad);
    });
    Ok(scale(&a, 1.0 / (n as f64 * sphere_volume(n))))
}

/// One row of the decay scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaRow {
    pub pole: Vec<f64>,
    pub t: f64,
    /// `‖K∘φ_{P,t} − K(P)‖²_{L²}`
    pub deviation: f64,
    /// `|∫ K∘φ_{P,t}(x) x dx|`
    pub moment: f64,
    pub ratio: f64,
}

/// Ratios `‖K∘φ_{P,t} − K(P)‖²_{L²} / |∫K∘φ_{P,t}(x)x dx|` over the given
/// poles and dilations. Pairs whose moment is at the quadrature noise level
/// (below `1e−12·sup|K|·|S^n|`) are left out.
pub fn omega_decay_scan<F: SphereFn + ?Sized>(
    k: &F,
    poles: &[Point],
    schedule: &[f64],
    rule: &MomentRule,
) -> Result<Vec<OmegaRow>> {
    let vol = sphere_volume(rule.n);
    let mut rows = Vec::new();
    for p in poles {
        for &t in schedule {
            check_args(p, t, rule)?;
            let kp = k.value(p);
            let (mut dev, mut g, mut sup) = (0.0, ZERO, 0.0f64);
            rule.visit(p, t, |q| {
                let v = k.value(&q.y);
                sup = sup.max(v.abs());
                dev += q.weight * (v - kp).powi(2);
                g = axpy(&g, q.weight * v, &q.x);
            });
            let moment = norm(&g);
            if moment <= 1e-12 * sup.max(f64::MIN_POSITIVE) * vol {
                continue;
            }
            rows.push(OmegaRow {
                pole: p[..=rule.n].to_vec(),
                t,
                deviation: dev,
                moment,
                ratio: dev / moment,
            });
        }
    }
    Ok(rows)
}

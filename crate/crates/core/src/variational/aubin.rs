use crate::conformal::center_and_normalize;
use crate::fracop::{hsigma_energy, FracOperatorSpec};
use crate::sphere::{sht_inverse, SpectralField, SphereGrid};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Settings shared by the two explorers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AubinConfig {
    pub lmax: usize,
    /// Ascent/descent steps per start.
    pub iterations: usize,
    pub seed: u64,
    /// Root-mean-square size of the random perturbation of the constant.
    pub start_amplitude: f64,
}

impl Default for AubinConfig {
    fn default() -> Self {
        AubinConfig {
            lmax: 10,
            iterations: 60,
            seed: 0,
            start_amplitude: 0.5,
        }
    }
}

/// Outcome of an exploration over the centred slice
/// `M₀^p = {⨍|v|^p = 1, ⨍ x|v|^p = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AubinReport {
    pub kind: String,
    pub p: f64,
    /// `ε` for the improved inequality, `a` for the Sobolev-type one.
    pub parameter: f64,
    pub samples: usize,
    /// Starts whose projection onto `M₀^p` failed.
    pub skipped: usize,
    /// Smallest value of left side minus right side over all sampled points.
    pub worst_gap: f64,
    /// `C_ε` for the improved inequality; the smallest `a` consistent with
    /// the sampled points for the Sobolev-type one.
    pub empirical_constant: f64,
    /// Sampled points with gap below `−1e−12`.
    pub violations: usize,
    pub seed: u64,
}

/// Averaged quantities of a point of `M₀^p`.
#[derive(Clone, Copy, Debug)]
struct Point0 {
    /// `⨍ v P_σ v`
    e: f64,
    /// `⨍ v²`
    d: f64,
}

/// Retraction onto `M₀^p` by adding a constant and a linear function.
pub struct SliceProjection {
    grid: Arc<SphereGrid>,
    p: f64,
    lmax: usize,
}

impl SliceProjection {
    pub fn new(lmax: usize, p: f64) -> Result<Self> {
        Ok(SliceProjection {
            grid: SphereGrid::s2(2 * lmax + 2, 4 * lmax + 4)?,
            p,
            lmax,
        })
    }

    /// Scale `c` to unit `L^p` mean, then solve for `(μ, η)`.
    pub fn project(&self, c: &SpectralField) -> Result<SpectralField> {
        let v = sht_inverse(c, &self.grid)?;
        let m = v.map(|x| x.abs().powf(self.p)).mean();
        if !(m > 0.0) {
            return Err(Error::InvalidParameter("zero field".into()));
        }
        let s = m.powf(-1.0 / self.p);
        let base = v.map(|x| s * x);
        let (mu, eta) = center_and_normalize(&base, self.p)?;
        let mut out = c.scale(s).with_lmax(self.lmax);
        let c1 = (4.0 * PI / 3.0).sqrt();
        out.set(0, 0, out.get(0, 0) + mu * (4.0 * PI).sqrt());
        out.set(1, 1, out.get(1, 1) + eta[0] * c1);
        out.set(1, -1, out.get(1, -1) + eta[1] * c1);
        out.set(1, 0, out.get(1, 0) + eta[2] * c1);
        Ok(out)
    }
}

fn averages(c: &SpectralField, spec: &FracOperatorSpec) -> Point0 {
    let w = spec.volume();
    Point0 {
        e: hsigma_energy(c, spec) / w,
        d: c.dot(c) / w,
    }
}

/// Projected ascent of `f` over `M₀^p` from `start`, using the
/// `P_σ^{−1}`-preconditioned gradient `grad(c)`. Returns every accepted point.
fn ascend(
    proj: &SliceProjection,
    spec: &FracOperatorSpec,
    start: SpectralField,
    iterations: usize,
    f: &dyn Fn(Point0) -> f64,
    grad: &dyn Fn(&SpectralField, Point0) -> SpectralField,
) -> Result<Vec<SpectralField>> {
    let mut c = proj.project(&start)?;
    let mut path = vec![c.clone()];
    let mut val = f(averages(&c, spec));
    let mut alpha = 0.1;
    for _ in 0..iterations {
        let g = grad(&c, averages(&c, spec)).scale_degrees(|k| 1.0 / spec.eigenvalue(k));
        let mut improved = false;
        for _ in 0..30 {
            if let Ok(trial) = proj.project(&c.axpy(alpha, &g)) {
                let tv = f(averages(&trial, spec));
                if tv > val {
                    c = trial;
                    val = tv;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
        path.push(c.clone());
        alpha = (alpha * 2.0).min(1.0);
    }
    Ok(path)
}

fn random_start(rng: &mut ChaCha8Rng, cfg: &AubinConfig) -> SpectralField {
    let noise = SpectralField::random(rng, cfg.lmax, 1, 1.0);
    let s = cfg.start_amplitude * (4.0 * PI).sqrt() / noise.l2_norm().max(1e-300);
    SpectralField::constant(cfg.lmax, 1.0).axpy(s, &noise)
}

fn check_inputs(p: f64, samples: usize, spec: &FracOperatorSpec) -> Result<()> {
    if spec.n != 2 {
        return Err(Error::UnsupportedDimension(spec.n));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "at least one sample is required".into(),
        ));
    }
    let q = spec.critical_exponent();
    if !(p > 2.0 && p <= q) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} is not in (2, {q}]"
        )));
    }
    Ok(())
}

/// Explore `2^{2/p−1}(1+ε) ⨍vP_σv + C_ε ⨍v² ≥ P_σ(1)` on `M₀^p`.
///
/// From each seeded start the ratio `(P_σ(1) − a⨍vP_σv)/⨍v²`,
/// `a = 2^{2/p−1}(1+ε)`, is maximized by projected ascent; `C_ε` is the
/// largest maximum found (at least 0). The inequality with that constant is
/// then checked at every point visited by every run.
pub fn aubin_explore(
    p: f64,
    eps: f64,
    samples: usize,
    cfg: &AubinConfig,
    spec: &FracOperatorSpec,
) -> Result<AubinReport> {
    check_inputs(p, samples, spec)?;
    let a = 2f64.powf(2.0 / p - 1.0) * (1.0 + eps);
    let p1 = spec.p_one();
    let w = spec.volume();
    let proj = SliceProjection::new(cfg.lmax, p)?;
    let ratio = |x: Point0| (p1 - a * x.e) / x.d;
    // d/dc of (P1 − aE)/D with E = c·Λc/ω, D = c·c/ω
    let grad = |c: &SpectralField, x: Point0| {
        let de = c.scale_degrees(|k| spec.eigenvalue(k)).scale(2.0 / w);
        let dd = c.scale(2.0 / w);
        de.scale(-a / x.d).axpy(-(p1 - a * x.e) / (x.d * x.d), &dd)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // the constant lies on the slice
    let one = SpectralField::constant(cfg.lmax, 1.0);
    let mut best = ratio(averages(&one, spec));
    let mut visited = vec![one];
    let mut skipped = 0;
    for _ in 0..samples {
        let start = random_start(&mut rng, cfg);
        match ascend(&proj, spec, start, cfg.iterations, &ratio, &grad) {
            Ok(path) => {
                let last = path.last().expect("nonempty path");
                best = best.max(ratio(averages(last, spec)));
                visited.extend(path);
            }
            Err(_) => skipped += 1,
        }
    }
    let c_eps = best.max(0.0);
    let gaps: Vec<f64> = visited
        .iter()
        .map(|c| {
            let x = averages(c, spec);
            a * x.e + c_eps * x.d - p1
        })
        .collect();
    Ok(AubinReport {
        kind: "aubin".into(),
        p,
        parameter: eps,
        samples,
        skipped,
        worst_gap: gaps.iter().cloned().fold(f64::INFINITY, f64::min),
        empirical_constant: c_eps,
        violations: gaps.iter().filter(|&&g| g < -1e-12).count(),
        seed: cfg.seed,
    })
}

/// Explore `a ⨍vP_σv + (1−a) P_σ(1) ⨍v² ≥ P_σ(1)` on `M₀^p` by projected
/// descent of the left side minus the right side from seeded starts. The
/// reported constant is the smallest `a` compatible with every visited point,
/// `max P_σ(1)(1 − ⨍v²)/(⨍vP_σv − P_σ(1)⨍v²)`.
pub fn aubin_sobolev_explore(
    p: f64,
    a: f64,
    samples: usize,
    cfg: &AubinConfig,
    spec: &FracOperatorSpec,
) -> Result<AubinReport> {
    check_inputs(p, samples, spec)?;
    let p1 = spec.p_one();
    let w = spec.volume();
    let proj = SliceProjection::new(cfg.lmax, p)?;
    let neg_gap = |x: Point0| -(a * x.e + (1.0 - a) * p1 * x.d - p1);
    let grad = |c: &SpectralField, _x: Point0| {
        c.scale_degrees(|k| -(2.0 / w) * (a * spec.eigenvalue(k) + (1.0 - a) * p1))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut gaps = Vec::new();
    let mut a_star = f64::NEG_INFINITY;
    let mut skipped = 0;
    for _ in 0..samples {
        let start = random_start(&mut rng, cfg);
        match ascend(&proj, spec, start, cfg.iterations, &neg_gap, &grad) {
            Ok(path) => {
                for c in &path {
                    let x = averages(c, spec);
                    gaps.push(-neg_gap(x));
                    let den = x.e - p1 * x.d;
                    if den > 1e-12 {
                        a_star = a_star.max(p1 * (1.0 - x.d) / den);
                    }
                }
            }
            Err(_) => skipped += 1,
        }
    }
    Ok(AubinReport {
        kind: "aubin-sobolev".into(),
        p,
        parameter: a,
        samples,
        skipped,
        worst_gap: gaps.iter().cloned().fold(f64::INFINITY, f64::min),
        empirical_constant: a_star,
        violations: gaps.iter().filter(|&&g| g < -1e-12).count(),
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> FracOperatorSpec {
        FracOperatorSpec::new(2, 0.5).unwrap()
    }

    #[test]
    fn projection_lands_on_slice() {
        let proj = SliceProjection::new(6, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c =
            SpectralField::constant(6, 1.0).axpy(0.2, &SpectralField::random(&mut rng, 6, 1, 1.0));
        let v = sht_inverse(&proj.project(&c).unwrap(), &proj.grid).unwrap();
        let d = v.map(|x| x.abs().powi(3));
        assert!((d.mean() - 1.0).abs() < 1e-12);
        let m = d.first_moment();
        assert!(m.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn constant_needs_positive_constant() {
        let cfg = AubinConfig {
            iterations: 20,
            lmax: 6,
            ..Default::default()
        };
        let r = aubin_explore(3.0, 0.1, 3, &cfg, &spec()).unwrap();
        let a = 2f64.powf(2.0 / 3.0 - 1.0) * 1.1;
        assert!(r.empirical_constant >= 0.5 * (1.0 - a) - 1e-12);
        assert_eq!(r.violations, 0);
        assert!(aubin_explore(3.0, 0.1, 0, &cfg, &spec()).is_err());
        let big = aubin_explore(3.0, 10.0, 3, &cfg, &spec()).unwrap();
        assert!(big.empirical_constant < r.empirical_constant);
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = AubinConfig {
            iterations: 10,
            lmax: 6,
            seed: 9,
            ..Default::default()
        };
        let a = aubin_sobolev_explore(3.5, 0.8, 4, &cfg, &spec()).unwrap();
        let b = aubin_sobolev_explore(3.5, 0.8, 4, &cfg, &spec()).unwrap();
        assert_eq!(a, b);
    }
}

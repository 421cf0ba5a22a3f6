use super::map::{is_resolved, phi_apply, pushforward_fn, ConformalParam};
use crate::fracop::FracOperatorSpec;
use crate::sphere::point::{Point, ZERO};
use crate::sphere::{sht_forward, sht_inverse, GridField, SpectralField, SphereFn, SphereGrid};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// `⨍ x |v|^q / ⨍ |v|^q` with `q = 2n/(n−2σ)`; on the unit critical-norm
/// sphere this is `⨍ x |v|^q`.
pub fn center_of_mass(v: &GridField, spec: &FracOperatorSpec) -> Point {
    let q = spec.critical_exponent();
    let d = v.map(|x| x.abs().powf(q));
    let mass = d.integral();
    let m = d.first_moment();
    let mut out = ZERO;
    for i in 0..4 {
        out[i] = m[i] / mass;
    }
    out
}

/// A centred function `w ∈ M₀` and the conformal parameter with
/// `v = T_{φ_p}^{−1} w`.
#[derive(Clone, Debug)]
pub struct NormalizedPair {
    pub w: GridField,
    pub param: ConformalParam,
    /// Newton iterations used.
    pub iterations: usize,
    /// `|⨍ x |w|^q|` at the solution, by the change-of-variables formula.
    pub residual: f64,
}

const MAX_ITER: usize = 50;
const TOL: f64 = 1e-13;

/// Solve `⨍ x |T_{φ_p} v|^q = 0` for `p ∈ B^{n+1}` by damped Newton, starting
/// from the centre of mass of `v`. The objective is evaluated through the
/// substitution `y = φ_p(x)`, i.e. as `⨍ φ_p^{−1}(y) |v(y)|^q dy`, so only
/// the samples of `v` on `grid` enter; `f` is evaluated at mapped nodes only
/// to build `w`. `v` is first scaled to `⨍|v|^q = 1`.
pub fn decompose_fn<F: SphereFn + ?Sized>(
    f: &F,
    grid: &Arc<SphereGrid>,
    spec: &FracOperatorSpec,
) -> Result<NormalizedPair> {
    let n = grid.dim();
    let q = spec.critical_exponent();
    let v = GridField::sample(grid, f);
    let density = v.map(|x| x.abs().powf(q));
    let mass = density.mean();
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter("v vanishes identically".into()));
    }
    let scale = mass.powf(-1.0 / q);
    let total = grid.total_weight() * mass;

    let residual = |p: &[f64]| -> Result<DVector<f64>> {
        let param = ConformalParam::from_ball(n, &crate::sphere::point::from_slice(p))?;
        let inv = param.inverse();
        let mut r = DVector::zeros(n + 1);
        for ((y, w), d) in grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .zip(density.values())
        {
            let (x, _) = phi_apply(&inv, y);
            for i in 0..=n {
                r[i] += w * d * x[i];
            }
        }
        Ok(r / total)
    };

    let c0 = center_of_mass(&v, spec);
    let mut p: Vec<f64> = c0[..=n].to_vec();
    let mut r = residual(&p)?;
    let mut iterations = 0;
    while r.norm() > TOL {
        if iterations == MAX_ITER {
            return Err(Error::NewtonFailed {
                iterations,
                residual: r.norm(),
            });
        }
        iterations += 1;
        let h = 1e-6;
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        for j in 0..=n {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp[j] += h;
            pm[j] -= h;
            let col = (residual(&pp)? - residual(&pm)?) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let step = jac
            .lu()
            .solve(&(-&r))
            .ok_or_else(|| Error::SingularMatrix("centre-of-mass Jacobian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = p
                .iter()
                .zip(step.iter())
                .map(|(a, b)| a + lambda * b)
                .collect();
            if trial.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                let rt = residual(&trial)?;
                if rt.norm() < r.norm() {
                    p = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if r.norm() < 1e-11 {
                break;
            }
            return Err(Error::NewtonFailed {
                iterations,
                residual: r.norm(),
            });
        }
    }
    let param = ConformalParam::from_ball(n, &crate::sphere::point::from_slice(&p))?;
    let scaled = |x: &Point| scale * f.value(x);
    let w = pushforward_fn(&scaled, &param, grid, spec);
    Ok(NormalizedPair {
        w,
        param,
        iterations,
        residual: r.norm(),
    })
}

/// [`decompose_fn`] for sampled data on `S^2`, composing through the
/// harmonic expansion of `v` at the grid's full band limit.
pub fn decompose_varpi(v: &GridField, spec: &FracOperatorSpec) -> Result<NormalizedPair> {
    let g = v.grid();
    let lmax = (g.polar() - 1).min((g.azimuthal() - 1) / 2);
    let c = sht_forward(v, lmax)?;
    if !is_resolved(&c) {
        return Err(Error::ResolutionTooCoarse(
            "v is not resolved by the grid's harmonic expansion".into(),
        ));
    }
    decompose_fn(&c, g, spec)
}

/// Find `(μ, η)` with `⨍|1 + w̃ + μ + η·x|^p = 1` and `⨍|1 + w̃ + μ + η·x|^p x = 0`
/// by Newton's method on `grid`. `w̃` must have no degree-0 or degree-1 content.
pub fn mu_eta_solve(w: &SpectralField, p: f64, grid: &Arc<SphereGrid>) -> Result<(f64, Point)> {
    let low: f64 = w.coeffs()[..4.min(w.coeffs().len())]
        .iter()
        .map(|c| c.abs())
        .fold(0.0, f64::max);
    if low > 1e-12 {
        return Err(Error::LowDegreeContent(format!(
            "degree ≤ 1 coefficient of size {low:e}"
        )));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent p = {p}")));
    }
    let base = sht_inverse(w, grid)?.map(|x| 1.0 + x);
    center_and_normalize(&base, p)
}

/// Find `(μ, η)` with `⨍|b + μ + η·x|^p = 1` and `⨍|b + μ + η·x|^p x = 0`
/// for a sampled base function `b` on `S^2`.
pub fn center_and_normalize(base: &GridField, p: f64) -> Result<(f64, Point)> {
    let grid = base.grid();
    let vol = grid.total_weight();
    let nodes = grid.nodes();
    let weights = grid.weights();
    let eval = |z: &DVector<f64>| -> (DVector<f64>, DMatrix<f64>) {
        let mut f = DVector::zeros(4);
        let mut jac = DMatrix::zeros(4, 4);
        for ((x, wq), b) in nodes.iter().zip(weights).zip(base.values()) {
            let u = b + z[0] + z[1] * x[0] + z[2] * x[1] + z[3] * x[2];
            let a = u.abs();
            let up = a.powf(p);
            let d = if a > 0.0 {
                p * a.powf(p - 2.0) * u
            } else {
                0.0
            };
            let basis = [1.0, x[0], x[1], x[2]];
            for i in 0..4 {
                f[i] += wq * up * basis[i];
                for j in 0..4 {
                    jac[(i, j)] += wq * d * basis[i] * basis[j];
                }
            }
        }
        f /= vol;
        jac /= vol;
        f[0] -= 1.0;
        (f, jac)
    };
    let mut z = DVector::zeros(4);
    let (mut f, mut jac) = eval(&z);
    for it in 0..MAX_ITER {
        if f.amax() < 1e-14 {
            return Ok((z[0], [z[1], z[2], z[3], 0.0]));
        }
        if !f.amax().is_finite() {
            return Err(Error::NewtonFailed {
                iterations: it,
                residual: f.amax(),
            });
        }
        let step = jac
            .clone()
            .lu()
            .solve(&(-&f))
            .ok_or_else(|| Error::SingularMatrix("(μ, η) Jacobian".into()))?;
        // damp on the residual norm so that starts far from 1 still converge
        let mut lambda = 1.0;
        loop {
            let trial = &z + &step * lambda;
            let (ft, jt) = eval(&trial);
            if ft.norm() < f.norm() || lambda < 1e-6 {
                z = trial;
                f = ft;
                jac = jt;
                break;
            }
            lambda *= 0.5;
        }
    }
    if f.amax() < 1e-12 {
        return Ok((z[0], [z[1], z[2], z[3], 0.0]));
    }
    Err(Error::NewtonFailed {
        iterations: MAX_ITER,
        residual: f.amax(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::point::{basis, dot, norm, scale as vscale, sub};

    fn spec() -> FracOperatorSpec {
        FracOperatorSpec::new(2, 0.5).unwrap()
    }

    #[test]
    fn constant_is_centred() {
        let g = SphereGrid::s2(16, 32).unwrap();
        let one = GridField::constant(&g, 1.0);
        assert!(norm(&center_of_mass(&one, &spec())) < 1e-14);
        let pair = decompose_varpi(&one, &spec()).unwrap();
        assert!((pair.param.t() - 1.0).abs() < 1e-12);
        assert!(pair.w.values().iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn concentrated_function_decomposes() {
        // T^{-1} of a constant: (2t/D')^{1/2} with pole −P, t = 2, P = e₃.
        let g = SphereGrid::s2(48, 96).unwrap();
        let param = ConformalParam::new(2, basis(2), 2.0).unwrap();
        let inv = param.inverse();
        let v = GridField::sample(&g, &|x: &Point| inv.weight_factor(x, &spec()));
        let com = center_of_mass(&v, &spec());
        assert!(com[2] > 0.1 && com[0].abs() < 1e-12);
        let pair = decompose_varpi(&v, &spec()).unwrap();
        assert!(norm(&sub(&pair.param.ball_point(), &vscale(&basis(2), 0.5))) < 1e-8);
        assert!(pair.w.values().iter().all(|x| (x - 1.0).abs() < 1e-8));
        assert!(dot(&center_of_mass(&pair.w, &spec()), &basis(2)).abs() < 1e-8);
    }

    #[test]
    fn mu_eta_trivial_and_small() {
        let g = SphereGrid::s2(24, 48).unwrap();
        let (mu, eta) = mu_eta_solve(&SpectralField::zeros(4), 4.0, &g).unwrap();
        assert!(mu.abs() < 1e-14 && norm(&eta) < 1e-14);
        let eps = 1e-2;
        let w = SpectralField::harmonic(4, 2, 0).scale(eps);
        let (mu, _) = mu_eta_solve(&w, 4.0, &g).unwrap();
        let avg = eps * eps / (4.0 * std::f64::consts::PI);
        let want = -1.5 * avg;
        assert!((mu - want).abs() < 0.05 * want.abs(), "{mu} {want}");
        assert!(matches!(
            mu_eta_solve(&SpectralField::harmonic(4, 1, 0), 4.0, &g),
            Err(Error::LowDegreeContent(_))
        ));
    }
}

use super::identities::{kw_residual, kw_scale};
use crate::fracop::{apply_ps_inverse_spectral, hsigma_energy, FracOperatorSpec};
use crate::sphere::point::Point;
use crate::sphere::{GridField, ShtPlan, SpectralField, SpectralSnapshot, SphereGrid};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    #[default]
    None,
    Antipodal,
}

/// Settings of the subcritical minimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Subcritical exponent, `1 < p < (n+2σ)/(n−2σ)`.
    pub p: f64,
    pub lmax: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub max_iter: usize,
    /// Stop once the band-limited residual `P_σc − λ Π(Kv^p)` is below this in `L²`;
    /// the reported `el_residual` is measured on the grid and includes truncation.
    pub tol: f64,
    pub symmetry: Symmetry,
    pub seed: u64,
    /// Amplitude of the random perturbation of the constant start.
    pub start_amplitude: f64,
    /// `sup v / mean v` above which a continuation stage is flagged as concentrating.
    pub concentration_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 2.5,
            lmax: 24,
            initial_step: 1.0,
            backtrack: 0.5,
            max_iter: 3000,
            tol: 1e-8,
            symmetry: Symmetry::None,
            seed: 0,
            start_amplitude: 0.3,
            concentration_threshold: 20.0,
        }
    }
}

/// Quadrature grid used by the solver for band limit `lmax`: twice the
/// rings needed by the transform, so that `K|v|^{p+1}` is well integrated.
pub fn solver_grid(lmax: usize) -> Result<Arc<SphereGrid>> {
    SphereGrid::s2(2 * lmax + 2, 4 * lmax + 4)
}

/// A computed critical point of `∫vP_σv` on `{∫K|v|^{p+1} = 1}`.
#[derive(Clone, Debug)]
pub struct SolutionRecord {
    pub field: SpectralField,
    pub grid_field: GridField,
    pub p: f64,
    /// `∫ v P_σ v`, equal to `λ` on the constraint surface.
    pub energy: f64,
    /// `∫ K |v|^{p+1}`
    pub constraint: f64,
    pub lambda: f64,
    /// Vector multiplier of the centring constraint, when one is imposed.
    pub lambda_vector: Option<Point>,
    /// `‖P_σv − λKv^p‖_{L²}` on the quadrature grid.
    pub el_residual: f64,
    /// Same residual with `Kv^p` projected to the band limit.
    pub galerkin_residual: f64,
    /// Kazdan–Warner residual divided by `max|∇K|·∫|v|^{2n/(n−2σ)}`.
    pub kw_residual: f64,
    pub sup_over_mean: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether `|v|` replaced a sign-changing iterate.
    pub abs_replaced: bool,
    pub objective_trace: Vec<f64>,
}

/// Serializable view of a [`SolutionRecord`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolutionSummary {
    pub p: f64,
    pub lambda: f64,
    pub energy: f64,
    pub constraint: f64,
    pub lambda_vector: Option<Vec<f64>>,
    pub el_residual: f64,
    pub galerkin_residual: f64,
    pub kw_residual: f64,
    pub sup_over_mean: f64,
    pub iterations: usize,
    pub converged: bool,
    pub abs_replaced: bool,
    pub min_value: f64,
    pub field: SpectralSnapshot,
}

impl SolutionRecord {
    pub fn summary(&self, sigma: f64) -> SolutionSummary {
        SolutionSummary {
            p: self.p,
            lambda: self.lambda,
            energy: self.energy,
            constraint: self.constraint,
            lambda_vector: self.lambda_vector.map(|v| v[..3].to_vec()),
            el_residual: self.el_residual,
            galerkin_residual: self.galerkin_residual,
            kw_residual: self.kw_residual,
            sup_over_mean: self.sup_over_mean,
            iterations: self.iterations,
            converged: self.converged,
            abs_replaced: self.abs_replaced,
            min_value: self.grid_field.min(),
            field: self.field.snapshot(sigma),
        }
    }
}

struct Problem<'a> {
    spec: FracOperatorSpec,
    k: &'a GridField,
    plan: ShtPlan,
    p: f64,
    symmetry: Symmetry,
}

struct State {
    c: SpectralField,
    v: Vec<f64>,
    energy: f64,
    den: f64,
}

impl Problem<'_> {
    fn state(&self, c: SpectralField) -> State {
        let v = self.plan.inverse_values(&c);
        let den: f64 = self
            .k
            .grid()
            .weights()
            .iter()
            .zip(self.k.values())
            .zip(&v)
            .map(|((w, k), v)| w * k * v.abs().powf(self.p + 1.0))
            .sum();
        let energy = hsigma_energy(&c, &self.spec);
        State { c, v, energy, den }
    }

    fn objective(&self, s: &State) -> f64 {
        s.energy / s.den.powf(2.0 / (self.p + 1.0))
    }

    /// Rescale to `∫K|v|^{p+1} = 1`.
    fn normalize(&self, s: State) -> State {
        let f = s.den.powf(-1.0 / (self.p + 1.0));
        let c = s.c.scale(f);
        self.state(c)
    }

    /// Analysis of `K|v|^{p−1}v`.
    fn nonlinear(&self, s: &State) -> SpectralField {
        let vals: Vec<f64> =
            s.v.iter()
                .zip(self.k.values())
                .map(|(v, k)| k * v.abs().powf(self.p - 1.0) * v)
                .collect();
        self.project(self.plan.forward_values(&vals))
    }

    fn project(&self, c: SpectralField) -> SpectralField {
        match self.symmetry {
            Symmetry::None => c,
            Symmetry::Antipodal => c.even_part(),
        }
    }

    /// `‖P_σ v − λ K|v|^{p−1}v‖_{L²}` on the grid.
    /// `P_σc − λb` with `b` the projected nonlinearity.
    fn galerkin(&self, s: &State, lambda: f64, b: &SpectralField) -> SpectralField {
        s.c.scale_degrees(|k| self.spec.eigenvalue(k))
            .axpy(-lambda, b)
    }

    fn el_residual(&self, s: &State, lambda: f64) -> f64 {
        let pv = self
            .plan
            .inverse_values(&s.c.scale_degrees(|k| self.spec.eigenvalue(k)));
        let g = self.k.grid();
        g.weights()
            .iter()
            .zip(&pv)
            .zip(s.v.iter().zip(self.k.values()))
            .map(|((w, pv), (v, k))| {
                let r = pv - lambda * k * v.abs().powf(self.p - 1.0) * v;
                w * r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn check_even(k: &GridField) -> Result<()> {
    let g = k.grid();
    let (np, na) = (g.polar(), g.azimuthal());
    if na % 2 != 0 {
        return Err(Error::InvalidResolution(
            "antipodal symmetry needs an even azimuthal count".into(),
        ));
    }
    let vals = k.values();
    for i in 0..np {
        for j in 0..na {
            let a = vals[i * na + j];
            let b = vals[(np - 1 - i) * na + (j + na / 2) % na];
            if (a - b).abs() > 1e-10 {
                return Err(Error::InvalidParameter(
                    "K is not antipodally symmetric".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Minimize `∫vP_σv / (∫K|v|^{p+1})^{2/(p+1)}` from a seeded random start
/// near the constant. See [`minimize_from`].
pub fn minimize_subcritical(
    k: &GridField,
    cfg: &SolverConfig,
    spec: &FracOperatorSpec,
) -> Result<SolutionRecord> {
    minimize_from(k, cfg, spec, None)
}

/// Minimize from `start` (or a seeded random start), by gradient descent in
/// the `H^σ` metric: the `L²` gradient is preconditioned with `P_σ^{−1}`,
/// steps are chosen by Armijo backtracking on the scale-invariant quotient,
/// and the iterate is rescaled onto `∫K|v|^{p+1} = 1` after every step.
/// With antipodal symmetry the iterate is projected onto even degrees. If
/// the final iterate changes sign it is replaced once by `|v|` and the
/// descent resumes.
pub fn minimize_from(
    k: &GridField,
    cfg: &SolverConfig,
    spec: &FracOperatorSpec,
    start: Option<&SpectralField>,
) -> Result<SolutionRecord> {
    if spec.n != 2 || k.grid().dim() != 2 {
        return Err(Error::UnsupportedDimension(spec.n));
    }
    let pc = spec.critical_power();
    if !(cfg.p > 1.0 && cfg.p < pc) {
        return Err(Error::InvalidParameter(format!(
            "p = {} is not in (1, {pc})",
            cfg.p
        )));
    }
    if !(cfg.tol > 0.0 && cfg.initial_step > 0.0 && cfg.backtrack > 0.0 && cfg.backtrack < 1.0) {
        return Err(Error::InvalidParameter(
            "tolerances and step rule must be positive".into(),
        ));
    }
    if k.max() <= 0.0 {
        return Err(Error::InvalidParameter(
            "K is nonpositive everywhere".into(),
        ));
    }
    if cfg.symmetry == Symmetry::Antipodal {
        check_even(k)?;
    }
    let prob = Problem {
        spec: *spec,
        k,
        plan: ShtPlan::new(k.grid(), cfg.lmax)?,
        p: cfg.p,
        symmetry: cfg.symmetry,
    };
    let c0 = match start {
        Some(s) => prob.project(s.with_lmax(cfg.lmax)),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let kmax = cfg.lmax.min(6);
            let noise = SpectralField::random(&mut rng, cfg.lmax, 1, 1.0)
                .with_lmax(kmax)
                .with_lmax(cfg.lmax);
            let pert = noise.scale(
                cfg.start_amplitude / noise.l2_norm().max(1e-300)
                    * (4.0 * std::f64::consts::PI).sqrt(),
            );
            prob.project(SpectralField::constant(cfg.lmax, 1.0).axpy(1.0, &pert))
        }
    };
    let mut s = prob.state(c0);
    if !(s.den > 0.0) {
        return Err(Error::Undefined(
            "∫K|v|^{p+1} ≤ 0 at the starting point".into(),
        ));
    }
    s = prob.normalize(s);
    let mut trace = vec![prob.objective(&s)];
    let mut iterations = 0;
    let mut abs_replaced = false;
    let mut converged = false;
    loop {
        let b = prob.nonlinear(&s);
        let lam = s.energy / s.den;
        let resid = prob.galerkin(&s, lam, &b);
        if resid.l2_norm() < cfg.tol {
            if s.v.iter().any(|&x| x < 0.0) && !abs_replaced {
                abs_replaced = true;
                let a: Vec<f64> = s.v.iter().map(|x| x.abs()).collect();
                s = prob.normalize(prob.state(prob.project(prob.plan.forward_values(&a))));
                trace.push(prob.objective(&s));
                continue;
            }
            converged = true;
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        iterations += 1;
        // d = −(c − λ P_σ^{−1} b), g = 2(P_σ c − λ b)
        let pinv_b = apply_ps_inverse_spectral(&b, spec)?;
        let d = pinv_b.scale(lam).axpy(-1.0, &s.c);
        let g = resid.scale(2.0);
        let slope = g.dot(&d);
        let f0 = prob.objective(&s);
        let mut alpha = cfg.initial_step;
        let mut next = None;
        for _ in 0..60 {
            let trial = prob.state(s.c.axpy(alpha, &d));
            if trial.den > 0.0 {
                let f1 = prob.objective(&trial);
                if f1 <= f0 + 1e-4 * alpha * slope + 4.0 * f64::EPSILON * f0.abs() {
                    next = Some(trial);
                    break;
                }
            }
            alpha *= cfg.backtrack;
        }
        match next {
            Some(t) => {
                s = prob.normalize(t);
                let f = prob.objective(&s);
                debug_assert!(f <= trace.last().unwrap() + 1e-14 * f.abs().max(1.0));
                trace.push(f);
            }
            None => break,
        }
    }
    finish(&prob, s, cfg, iterations, converged, abs_replaced, trace)
}

fn finish(
    prob: &Problem,
    s: State,
    cfg: &SolverConfig,
    iterations: usize,
    converged: bool,
    abs_replaced: bool,
    trace: Vec<f64>,
) -> Result<SolutionRecord> {
    let lambda = s.energy / s.den;
    let el = prob.el_residual(&s, lambda);
    let galerkin = prob.galerkin(&s, lambda, &prob.nonlinear(&s)).l2_norm();
    let grid_field = GridField::new(prob.k.grid().clone(), s.v.clone())?;
    let kw = kw_residual(&grid_field, prob.k, &prob.spec)?;
    let scale = kw_scale(&grid_field, prob.k, &prob.spec)?;
    let kw_rel = if scale > 0.0 { kw / scale } else { kw };
    let mean = grid_field.mean();
    let sup_over_mean = if mean > 0.0 {
        grid_field.max() / mean
    } else {
        f64::INFINITY
    };
    let positive = grid_field.min() > 0.0;
    Ok(SolutionRecord {
        field: s.c,
        grid_field,
        p: cfg.p,
        energy: s.energy,
        constraint: s.den,
        lambda,
        lambda_vector: None,
        el_residual: el,
        galerkin_residual: galerkin,
        kw_residual: kw_rel,
        sup_over_mean,
        iterations,
        converged: converged && positive,
        abs_replaced,
        objective_trace: trace,
    })
}

/// Solve along an increasing schedule of exponents, warm-starting each
/// stage from the previous solution. The chain stops after the first stage
/// that fails to converge (that record is included, with `converged = false`).
pub fn continuation_to_critical(
    k: &GridField,
    schedule: &[f64],
    cfg: &SolverConfig,
    spec: &FracOperatorSpec,
) -> Result<Vec<SolutionRecord>> {
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "exponent schedule must be strictly increasing".into(),
        ));
    }
    if let Some(&last) = schedule.last() {
        if last >= spec.critical_power() {
            return Err(Error::InvalidParameter(format!(
                "schedule reaches the critical power {}",
                spec.critical_power()
            )));
        }
    }
    let mut out: Vec<SolutionRecord> = Vec::with_capacity(schedule.len());
    for &p in schedule {
        let stage = SolverConfig { p, ..cfg.clone() };
        let start = out.last().map(|r| r.field.clone());
        let rec = minimize_from(k, &stage, spec, start.as_ref())?;
        let ok = rec.converged;
        out.push(rec);
        if !ok {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;
    use std::f64::consts::PI;

    fn spec() -> FracOperatorSpec {
        FracOperatorSpec::new(2, 0.5).unwrap()
    }

    #[test]
    fn constant_k_gives_constant_minimizer() {
        let cfg = SolverConfig {
            lmax: 12,
            tol: 1e-9,
            ..Default::default()
        };
        let g = solver_grid(cfg.lmax).unwrap();
        let k = GridField::constant(&g, 1.0);
        let r = minimize_subcritical(&k, &cfg, &spec()).unwrap();
        assert!(r.converged, "{} {}", r.iterations, r.el_residual);
        let bound = 0.5 * (4.0 * PI).powf(1.5 / 3.5);
        assert!(r.lambda <= bound + 1e-6);
        assert!((r.lambda - bound).abs() < 1e-8);
        assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        assert!((r.constraint - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configuration() {
        let g = solver_grid(8).unwrap();
        let k = GridField::constant(&g, 1.0);
        let cfg = SolverConfig {
            lmax: 8,
            p: 3.0,
            ..Default::default()
        };
        assert!(minimize_subcritical(&k, &cfg, &spec()).is_err());
        let neg = GridField::constant(&g, -1.0);
        let cfg = SolverConfig {
            lmax: 8,
            ..Default::default()
        };
        assert!(minimize_subcritical(&neg, &cfg, &spec()).is_err());
        let tilt = GridField::sample(&g, &Preset::Tilt { n: 2, eps: 0.2 });
        let cfg = SolverConfig {
            lmax: 8,
            symmetry: Symmetry::Antipodal,
            ..Default::default()
        };
        assert!(minimize_subcritical(&tilt, &cfg, &spec()).is_err());
    }

    #[test]
    fn continuation_edge_cases() {
        let g = solver_grid(8).unwrap();
        let k = GridField::constant(&g, 1.0);
        let cfg = SolverConfig {
            lmax: 8,
            ..Default::default()
        };
        assert!(continuation_to_critical(&k, &[], &cfg, &spec())
            .unwrap()
            .is_empty());
        assert!(continuation_to_critical(&k, &[2.5, 2.0], &cfg, &spec()).is_err());
        assert!(continuation_to_critical(&k, &[2.5, 3.0], &cfg, &spec()).is_err());
    }

    #[test]
    fn summary_serializes() {
        let cfg = SolverConfig {
            lmax: 6,
            tol: 1e-6,
            ..Default::default()
        };
        let g = solver_grid(cfg.lmax).unwrap();
        let r = minimize_subcritical(&GridField::constant(&g, 1.0), &cfg, &spec()).unwrap();
        let s = serde_json::to_string(&r.summary(0.5)).unwrap();
        assert!(s.starts_with("{\"p\":2.5,\"lambda\":"));
    }
}

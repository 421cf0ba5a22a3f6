//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p fracnir --test acceptance`.

use fracnir::bubbles::{
    bubble_field, bubble_residual, interaction_constant, interaction_integral, test_quotient,
    Bubble,
};
use fracnir::conformal::{pushforward_fn, ConformalParam};
use fracnir::degree::{
    a_map, brouwer_degree, g_map, index_count, CriticalPointModel, DegreeMethod, ModelK,
    MomentRule, Triangulation,
};
use fracnir::fracop::{
    apply_ps_spectral, hsigma_energy, sobolev_deficit, RieszOperator, SingularOperator,
};
use fracnir::presets::Preset;
use fracnir::sphere::point::{basis, normalize};
use fracnir::sphere::quadrature::gauss_legendre_interval;
use fracnir::sphere::{sht_forward, sht_inverse, sphere_volume};
use fracnir::variational::{
    aubin_explore, expansion_check_e, kw_residual, minimize_subcritical, quadratic_form_q,
    solver_grid, AubinConfig, SolverConfig, Symmetry,
};
use fracnir::{FracOperatorSpec, GridField, Point, SpectralField, SphereGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

type Outcome = Result<(bool, String), fracnir::Error>;

fn spec() -> FracOperatorSpec {
    FracOperatorSpec::new(2, 0.5).unwrap()
}

fn random_unit(rng: &mut ChaCha8Rng) -> Point {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 > 1e-2 && r2 <= 1.0 {
            return normalize(&[v[0], v[1], v[2], 0.0]);
        }
    }
}

fn c01_eigenvalues() -> Outcome {
    let s = spec();
    let dev = (0..=64)
        .map(|k| (s.eigenvalue(k) - (k as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    Ok((
        dev < 1e-12,
        format!("max |λ_k − (k+1/2)| = {dev:.2e} (tol 1e-12)"),
    ))
}

fn c02_operator_cross_check() -> Outcome {
    let s = spec();
    let grid = SphereGrid::s2(128, 256)?;
    let sing = SingularOperator::new(&grid, &s)?;
    let riesz = RieszOperator::new(&grid, &s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_p, mut worst_r) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let c = SpectralField::random(&mut rng, 8, 0, 0.5);
        let spectral = sht_inverse(&apply_ps_spectral(&c, &s)?, &grid)?;
        let singular = sing.apply_band_limited(&c)?;
        let diff = singular.zip_with(&spectral, |a, b| a - b)?;
        worst_p = worst_p.max(diff.l2_norm() / spectral.l2_norm());
        let back = riesz.apply(&spectral)?;
        let v = sht_inverse(&c, &grid)?;
        worst_r = worst_r.max(back.zip_with(&v, |a, b| a - b)?.sup_norm());
    }
    Ok((
        worst_p < 1e-3 && worst_r < 1e-3,
        format!("spectral vs singular rel L² {worst_p:.2e}, Riesz inversion sup {worst_r:.2e} (tol 1e-3, 128×256)"),
    ))
}

fn c03_bubble() -> Outcome {
    let s = spec();
    let b = Bubble::new(basis(2), 1.5, &s)?;
    let res = bubble_residual(&b, 64)?;
    let grid = SphereGrid::s2(128, 256)?;
    let norm = bubble_field(&b, &grid)
        .map(|v| v.powf(s.critical_exponent()))
        .integral();
    let dn = (norm - 4.0 * PI).abs();
    Ok((
        res < 1e-8 && dn < 1e-8,
        format!("residual {res:.2e}, |∫v^4 − 4π| = {dn:.2e} (tol 1e-8)"),
    ))
}

fn c04_conformal_invariance() -> Outcome {
    let s = spec();
    let grid = SphereGrid::s2(121, 242)?;
    let q = s.critical_exponent();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut de, mut dn) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let v = SpectralField::random(&mut rng, 6, 0, 0.5);
        let p = random_unit(&mut rng);
        let t = rng.gen_range(1.0..4.0);
        let param = ConformalParam::new(2, p, t)?;
        let tv = pushforward_fn(&v, &param, &grid, &s);
        let e0 = hsigma_energy(&v, &s);
        let e1 = hsigma_energy(&sht_forward(&tv, 120)?, &s);
        let n0 = sht_inverse(&v, &grid)?.map(|x| x.abs().powf(q)).integral();
        let n1 = tv.map(|x| x.abs().powf(q)).integral();
        de = de.max((e1 - e0).abs() / e0);
        dn = dn.max((n1 - n0).abs() / n0);
    }
    Ok((
        de < 1e-6 && dn < 1e-6,
        format!("energy drift {de:.2e}, critical norm drift {dn:.2e} (tol 1e-6, 20 triples)"),
    ))
}

/// `2^{−(n−2σ)/2} ω_{n−1} ∫₀^∞ 2^n r^{n−1}(1+r²)^{−(n+2σ)/2} dr` by
/// Gauss–Legendre after `r = tan θ`.
fn interaction_oracle(s: &FracOperatorSpec) -> f64 {
    let n = s.n as f64;
    let (x, w) = gauss_legendre_interval(0.0, PI / 2.0, 200);
    let integral: f64 = x
        .iter()
        .zip(&w)
        .map(|(th, w)| {
            let r = th.tan();
            w * 2f64.powf(n) * r.powf(n - 1.0) * (1.0 + r * r).powf(-(n + 2.0 * s.sigma) / 2.0)
                / th.cos().powi(2)
        })
        .sum();
    2f64.powf(-(n - 2.0 * s.sigma) / 2.0) * sphere_volume(s.n - 1) * integral
}

fn c05_interaction() -> Outcome {
    let s = spec();
    let a = interaction_oracle(&s);
    let closed = interaction_constant(&s);
    let ratios = [0.1, 0.05, 0.025]
        .iter()
        .map(|d| Ok(interaction_integral(1.0 + d, &s)? / d.sqrt()))
        .collect::<Result<Vec<f64>, fracnir::Error>>()?;
    let errs: Vec<f64> = ratios.iter().map(|r| (r - a).abs()).collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let rel = errs[2] / a;
    let agree = (closed - a).abs() < 1e-10 * a;
    Ok((
        rel < 0.05 && monotone && agree,
        format!(
            "ratios {:.4} {:.4} {:.4} → A = {a:.4} (closed form {closed:.4}), rel err {rel:.3} (tol 0.05), monotone {monotone}",
            ratios[0], ratios[1], ratios[2]
        ),
    ))
}

fn c06_test_quotient() -> Outcome {
    let s = spec();
    let grid = SphereGrid::s2(128, 256)?;
    let r = test_quotient(&GridField::constant(&grid, 1.0), 1.05, &basis(2), &s)?;
    Ok((
        r.quotient < r.bound && r.margin > 0.0,
        format!(
            "quotient {:.6} < bound {:.6}, margin {:.6}",
            r.quotient, r.bound, r.margin
        ),
    ))
}

fn c07_kazdan_warner() -> Outcome {
    let s = spec();
    let grid = solver_grid(16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = sht_inverse(
        &SpectralField::constant(16, 2.0).axpy(0.3, &SpectralField::random(&mut rng, 16, 1, 1.0)),
        &grid,
    )?;
    let r_const = kw_residual(&v, &GridField::constant(&grid, 1.3), &s)?;
    let k = GridField::sample(&grid, &Preset::EvenBand { n: 2, eps: 0.3 });
    let cfg = SolverConfig {
        p: 2.5,
        lmax: 16,
        symmetry: Symmetry::Antipodal,
        ..Default::default()
    };
    let rec = minimize_subcritical(&k, &cfg, &s)?;
    Ok((
        r_const < 1e-12 && rec.converged && rec.kw_residual < 1e-4,
        format!(
            "constant K {r_const:.2e} (tol 1e-12); even-band solver output {:.2e} relative to max|∇K|·∫v^4 (tol 1e-4), converged {}",
            rec.kw_residual, rec.converged
        ),
    ))
}

fn c08_subcritical_solver() -> Outcome {
    let s = spec();
    let grid = solver_grid(12)?;
    let k = GridField::constant(&grid, 1.0);
    let p = 2.5;
    let bound = s.p_one() * (4.0 * PI).powf((p - 1.0) / (p + 1.0));
    let mut lams = Vec::new();
    let mut ok = true;
    let mut worst_el = 0.0f64;
    for seed in 0..10 {
        let cfg = SolverConfig {
            p,
            lmax: 12,
            seed,
            ..Default::default()
        };
        let r = minimize_subcritical(&k, &cfg, &s)?;
        ok &= r.converged && r.grid_field.min() > 0.0 && r.lambda <= bound + 1e-6;
        worst_el = worst_el.max(r.el_residual);
        lams.push(r.lambda);
    }
    let hi = lams.iter().cloned().fold(f64::MIN, f64::max);
    let lo = lams.iter().cloned().fold(f64::MAX, f64::min);
    let spread = (hi - lo) / lo;
    Ok((
        ok && worst_el < 1e-6 && spread < 1e-5,
        format!(
            "λ ∈ [{lo:.10}, {hi:.10}] vs bound {bound:.10}, EL residual {worst_el:.2e} (tol 1e-6), spread {spread:.2e} (tol 1e-5)"
        ),
    ))
}

fn c09_quadratic_form() -> Outcome {
    let s = spec();
    let factor = 1.0 - s.eigenvalue(1) / s.eigenvalue(2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let mut w = SpectralField::random(&mut rng, 16, 2, 0.5);
        if i % 4 == 0 {
            // pure degree 2 attains equality
            w = w.scale_degrees(|k| if k == 2 { 1.0 } else { 0.0 });
        }
        let gap = quadratic_form_q(&w, &s)? - factor * hsigma_energy(&w, &s) / s.volume();
        worst = worst.min(gap);
    }
    let w = SpectralField::random(&mut rng, 6, 2, 1.0);
    let w = w.scale(0.2 * (4.0 * PI).sqrt() / w.l2_norm());
    let gaps = [1.0, 0.5, 0.25]
        .iter()
        .map(|h| Ok(expansion_check_e(&w.scale(*h), &s)?.gap))
        .collect::<Result<Vec<f64>, fracnir::Error>>()?;
    let ratios = [gaps[1] / gaps[0], gaps[2] / gaps[1]];
    // the remainder is cubic or quartic in the scale, so each halving divides
    // it by 8 to 16; a quadratic remainder would give 0.25
    let banded = ratios.iter().all(|r| r.abs() > 0.04 && r.abs() < 0.2);
    Ok((
        worst >= -1e-12 && banded,
        format!(
            "min Q − 0.4·⨍E = {worst:.2e} over 100 fields (tol −1e-12); remainder ratios {:.4} {:.4} (band 0.04..0.2)",
            ratios[0], ratios[1]
        ),
    ))
}

fn c10_sharp_sobolev() -> Outcome {
    let s = spec();
    let grid = solver_grid(12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let noise = SpectralField::random(&mut rng, 12, 0, 0.5);
        let amp = 10f64.powi(-(i % 5));
        let v = SpectralField::constant(12, 1.0 + (i % 3) as f64).axpy(amp, &noise);
        worst = worst.min(sobolev_deficit(&v, &s, &grid)?);
    }
    let c = sobolev_deficit(&SpectralField::constant(12, 1.7), &s, &grid)?;
    let fine = SphereGrid::s2(160, 320)?;
    let b = Bubble::new(normalize(&[0.2, -0.4, 0.7, 0.0]), 1.5, &s)?;
    let bc = sht_forward(&bubble_field(&b, &fine), 100)?;
    let d = sobolev_deficit(&bc, &s, &fine)?;
    Ok((
        worst >= -1e-9 && c.abs() < 1e-6 && d.abs() < 1e-6,
        format!("min deficit {worst:.2e} (tol −1e-9); constant {c:.2e}, bubble β=1.5 {d:.2e} (tol 1e-6)"),
    ))
}

fn quadric_models(q: &[f64], beta: f64) -> Vec<CriticalPointModel> {
    let d = q.len();
    let mut models = Vec::new();
    for axis in 0..d {
        let a: Vec<f64> = (0..d)
            .filter(|&j| j != axis)
            .map(|j| q[j] - q[axis])
            .collect();
        for sign in [1.0, -1.0] {
            let mut loc = vec![0.0; d];
            loc[axis] = sign;
            models.push(CriticalPointModel::new(&loc, beta, &a));
        }
    }
    models
}

fn c11_degree() -> Outcome {
    let s = spec();
    let rule = MomentRule::default_for(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let eps = 0.1;
    let tilt = Preset::Tilt { n: 2, eps };
    let mut moment_err = 0.0f64;
    for _ in 0..5 {
        let p = random_unit(&mut rng);
        let t = rng.gen_range(1.0..20.0);
        let g = g_map(&Preset::Const { c: 1.0 }, &p, t, &rule)?;
        moment_err = moment_err.max(g.iter().map(|x| x.abs()).fold(0.0, f64::max));
        let g = g_map(&tilt, &p, 1.0, &rule)?;
        let want = [0.0, 0.0, eps / 3.0];
        moment_err = moment_err.max((0..3).map(|i| (g[i] - want[i]).abs()).fold(0.0, f64::max));
    }
    let mut ibp = 0.0f64;
    for _ in 0..20 {
        let b: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        let k = move |x: &Point| {
            1.0 + b[0] * x[0] - b[1] * x[1] * x[2] + b[2] * x[2].powi(3) + b[3] * x[0] * x[1]
        };
        let p = random_unit(&mut rng);
        let t = rng.gen_range(1.0..12.0);
        let g = g_map(&k, &p, t, &rule)?;
        let a = a_map(&k, &p, t, None::<&Preset>, &s, &rule)?;
        ibp = ibp.max((0..3).map(|i| (g[i] - a[i]).abs()).fold(0.0, f64::max));
    }
    // sign-counting oracle: G₃ > 0 throughout the ball, so G has no zeros
    let tri = Triangulation::cube_sphere(2, 8)?;
    let mut min_g3 = f64::INFINITY;
    for r in [0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95] {
        for v in tri.vertices() {
            let (pole, t) = if r == 0.0 {
                (basis(2), 1.0)
            } else {
                (*v, 1.0 / (1.0 - r))
            };
            min_g3 = min_g3.min(g_map(&tilt, &pole, t, &rule)?[2]);
        }
    }
    let oracle = if min_g3 > 0.0 { 0 } else { i64::MIN };
    let mut tilt_deg = Vec::new();
    for sr in [0.85, 0.9, 0.95] {
        tilt_deg.push(brouwer_degree(&tilt, sr, &tri, &rule, DegreeMethod::Area)?.degree);
    }
    let tilt_ok = tilt_deg.iter().all(|d| *d == Some(oracle));
    let tilt_models = vec![
        CriticalPointModel::new(&[0.0, 0.0, 1.0], 1.5, &[-0.05, -0.05]),
        CriticalPointModel::new(&[0.0, 0.0, -1.0], 1.5, &[0.05, 0.05]),
    ];
    let configs = vec![
        ModelK::new(
            &s,
            1.0,
            &[],
            &[0.0, 0.1, 0.3],
            quadric_models(&[0.0, 0.1, 0.3], 1.5),
            0.6,
        )?,
        ModelK::new(
            &s,
            1.0,
            &[],
            &[0.0, 0.2, 0.3],
            quadric_models(&[0.0, 0.2, 0.3], 1.5),
            0.6,
        )?,
        ModelK::new(&s, 1.0, &[0.0, 0.0, 0.1], &[], tilt_models, 0.6)?,
    ];
    let mut pairs = Vec::new();
    for k in &configs {
        let predicted = index_count(&k.models, 2)?.predicted_degree;
        let numeric = brouwer_degree(k, 0.9, &tri, &rule, DegreeMethod::Area)?.degree;
        pairs.push((predicted, numeric));
    }
    let models_ok = pairs.iter().all(|(p, n)| Some(*p) == *n);
    Ok((
        moment_err < 1e-12 && ibp < 1e-8 && tilt_ok && models_ok,
        format!(
            "moment identities {moment_err:.1e} (tol 1e-12); A − G {ibp:.1e} (tol 1e-8); tilt degree {tilt_deg:?} at s = 0.85/0.9/0.95, oracle {oracle} (min G₃ {min_g3:.2e}); models (formula, numeric) {pairs:?}"
        ),
    ))
}

fn c12_aubin() -> Outcome {
    let s = spec();
    let cfg = AubinConfig {
        seed: 12,
        ..Default::default()
    };
    let r = aubin_explore(3.0, 0.1, 50, &cfg, &s)?;
    let again = aubin_explore(3.0, 0.1, 50, &cfg, &s)?;
    Ok((
        r.violations == 0 && r == again && r.skipped < r.samples,
        format!(
            "C_ε = {:.6}, worst gap {:.2e}, violations {}, skipped {}, deterministic {}",
            r.empirical_constant,
            r.worst_gap,
            r.violations,
            r.skipped,
            r == again
        ),
    ))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 12] = [
        ("eigenvalue identity", c01_eigenvalues),
        ("operator cross-check", c02_operator_cross_check),
        ("bubble identities", c03_bubble),
        ("conformal invariance", c04_conformal_invariance),
        ("interaction constant", c05_interaction),
        ("test-function quotient", c06_test_quotient),
        ("Kazdan-Warner residual", c07_kazdan_warner),
        ("subcritical solver", c08_subcritical_solver),
        ("quadratic form", c09_quadratic_form),
        ("sharp Sobolev", c10_sharp_sobolev),
        ("degree machinery", c11_degree),
        ("Aubin explorer", c12_aubin),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let id = format!("{:02}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|a| *a == id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{id}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

use crate::kspec::{curvature, read_json, Curvature};
use crate::opts::Opts;
use crate::output::{row, Check, ConfigError, Output};
use anyhow::Result;
use fracnir::bubbles::{
    bubble_field, bubble_residual, interaction_constant, interaction_integral, test_quotient,
    Bubble,
};
use fracnir::conformal::{pushforward_fn, ConformalParam};
use fracnir::degree::{
    brouwer_degree, g_map, index_count, omega_decay_scan, CriticalPointModel, DegreeMethod,
    MomentRule, Triangulation,
};
use fracnir::fracop::{apply_ps_spectral, hsigma_energy, RieszOperator, SingularOperator};
use fracnir::sphere::point::{basis, from_slice, norm, normalize, scale};
use fracnir::sphere::{multiplicity, sht_forward, sht_inverse};
use fracnir::variational::{
    aubin_explore, aubin_sobolev_explore, continuation_to_critical, minimize_subcritical,
    solver_grid, AubinConfig, SolutionRecord, SolverConfig, Symmetry,
};
use fracnir::{FracOperatorSpec, GridField, Point, SpectralField, SphereGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::sync::Arc;

fn config<T>(r: fracnir::Result<T>) -> std::result::Result<T, ConfigError> {
    r.map_err(|e| ConfigError(e.to_string()))
}

fn spec(o: &Opts) -> std::result::Result<FracOperatorSpec, ConfigError> {
    config(FracOperatorSpec::new(
        o.n.unwrap_or(2),
        o.sigma.unwrap_or(0.5),
    ))
}

fn require_s2(spec: &FracOperatorSpec, what: &str) -> std::result::Result<(), ConfigError> {
    if spec.n != 2 {
        return Err(ConfigError(format!("{what} is implemented for n = 2 only")));
    }
    Ok(())
}

fn grid(o: &Opts, default: (usize, usize)) -> std::result::Result<Arc<SphereGrid>, ConfigError> {
    let (p, a) = match &o.grid {
        None => default,
        Some(g) => {
            let bad = || ConfigError(format!("grid '{g}' is not POLARxAZIMUTHAL"));
            let (p, a) = g.split_once('x').ok_or_else(bad)?;
            (
                p.trim().parse().map_err(|_| bad())?,
                a.trim().parse().map_err(|_| bad())?,
            )
        }
    };
    config(SphereGrid::s2(p, a))
}

fn positive(v: usize, what: &str) -> std::result::Result<usize, ConfigError> {
    if v == 0 {
        return Err(ConfigError(format!("{what} must be positive")));
    }
    Ok(v)
}

fn rng(o: &Opts) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(o.seed.unwrap_or(0))
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Point {
    loop {
        let mut v = [0.0; 4];
        for c in v.iter_mut().take(n + 1) {
            *c = rng.gen_range(-1.0..1.0);
        }
        let r = norm(&v);
        if r > 0.1 && r <= 1.0 {
            return normalize(&v);
        }
    }
}

fn symmetry(o: &Opts, k: &Curvature) -> std::result::Result<Symmetry, ConfigError> {
    match o.symmetry.as_deref() {
        None => Ok(if k.is_even() && !k.is_constant() {
            Symmetry::Antipodal
        } else {
            Symmetry::None
        }),
        Some("none") => Ok(Symmetry::None),
        Some("antipodal") => Ok(Symmetry::Antipodal),
        Some(s) => Err(ConfigError(format!("unknown symmetry '{s}'"))),
    }
}

fn solver_config(o: &Opts, k: &Curvature) -> std::result::Result<SolverConfig, ConfigError> {
    let d = SolverConfig::default();
    Ok(SolverConfig {
        p: o.p.unwrap_or(d.p),
        lmax: positive(o.lmax.unwrap_or(d.lmax), "lmax")?,
        max_iter: o.max_iter.unwrap_or(d.max_iter),
        tol: o.tol.unwrap_or(d.tol),
        symmetry: symmetry(o, k)?,
        seed: o.seed.unwrap_or(0),
        ..d
    })
}

pub fn run(name: &str, o: &Opts, out: &Output) -> Result<Vec<Check>> {
    match name {
        "eig-check" => eig_check(o, out),
        "op-xcheck" => op_xcheck(o, out),
        "conformal-check" => conformal_check(o, out),
        "bubble-check" => bubble_check(o, out),
        "interaction-scan" => interaction_scan(o, out),
        "solve" => solve(o, out),
        "continue" => continuation(o, out),
        "kw-check" => kw_check(o, out),
        "quotient-check" => quotient_check(o, out),
        "aubin" => aubin(o, out, false),
        "aubin-sobolev" => aubin(o, out, true),
        "g-scan" => g_scan(o, out),
        "degree" => degree(o, out),
        "index-count" => index(o, out),
        "omega-scan" => omega_scan(o, out),
        _ => unreachable!("unknown subcommand {name}"),
    }
}

fn eig_check(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    let kmax = o.kmax.unwrap_or(64);
    let half = s.n as f64 / 2.0;
    let mut rows = Vec::new();
    let mut rec = 0.0f64;
    for k in 0..=kmax {
        let l = s.eigenvalue(k);
        rows.push(vec![
            k.to_string(),
            l.to_string(),
            multiplicity(k, s.n).to_string(),
        ]);
        if k < kmax {
            let kf = k as f64;
            let want = (kf + half + s.sigma) / (kf + half - s.sigma);
            rec = rec.max((s.eigenvalue(k + 1) / l / want - 1.0).abs());
        }
    }
    out.csv(&["k", "lambda", "multiplicity"], &rows)?;
    let mut checks = vec![Check::below(
        "eigenvalue recurrence",
        rec,
        1e-12,
        "Gamma-ratio recurrence",
    )];
    let mut report = json!({"kmax": kmax, "recurrence_deviation": rec});
    if s.n == 2 && s.sigma == 0.5 {
        let dev = (0..=kmax)
            .map(|k| (s.eigenvalue(k) - (k as f64 + 0.5)).abs())
            .fold(0.0, f64::max);
        report["closed_form_deviation"] = json!(dev);
        checks.push(Check::below(
            "closed form k + 1/2",
            dev,
            1e-12,
            "eigenvalue identity",
        ));
    }
    out.json(&report)?;
    Ok(checks)
}

fn op_xcheck(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    require_s2(&s, "op-xcheck")?;
    let g = grid(o, (128, 256))?;
    let count = positive(o.fields.unwrap_or(10), "fields")?;
    let degree = o.degree.unwrap_or(8);
    let sing = SingularOperator::new(&g, &s)?;
    let riesz = RieszOperator::new(&g, &s)?;
    let mut r = rng(o);
    let mut rows = Vec::new();
    let (mut wp, mut wr) = (0.0f64, 0.0f64);
    for i in 0..count {
        let c = SpectralField::random(&mut r, degree, 0, 0.5);
        let spectral = sht_inverse(&apply_ps_spectral(&c, &s)?, &g)?;
        let singular = sing.apply_band_limited(&c)?;
        let ep = singular.zip_with(&spectral, |a, b| a - b)?.l2_norm() / spectral.l2_norm();
        let v = sht_inverse(&c, &g)?;
        let er = riesz
            .apply(&spectral)?
            .zip_with(&v, |a, b| a - b)?
            .sup_norm();
        wp = wp.max(ep);
        wr = wr.max(er);
        rows.push(vec![i.to_string(), ep.to_string(), er.to_string()]);
    }
    out.csv(&["field", "singular_rel_l2", "riesz_sup"], &rows)?;
    out.json(
        &json!({"grid": g.descriptor(), "fields": count, "degree": degree,
        "singular_rel_l2": wp, "riesz_sup": wr}),
    )?;
    Ok(vec![
        Check::below(
            "spectral vs singular",
            wp,
            1e-3,
            "singular-integral form of P_sigma",
        ),
        Check::below(
            "Riesz inversion",
            wr,
            1e-3,
            "Riesz potential inverts P_sigma",
        ),
    ])
}

fn conformal_check(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    require_s2(&s, "conformal-check")?;
    let g = grid(o, (121, 242))?;
    let lmax = (g.polar() - 1).min((g.azimuthal() - 1) / 2);
    let count = positive(o.triples.unwrap_or(20), "triples")?;
    let tmax = o.tmax.unwrap_or(4.0);
    if !(tmax > 1.0) {
        return Err(ConfigError("tmax must exceed 1".into()).into());
    }
    let q = s.critical_exponent();
    let mut r = rng(o);
    let mut rows = Vec::new();
    let (mut de, mut dn) = (0.0f64, 0.0f64);
    for i in 0..count {
        let v = SpectralField::random(&mut r, o.degree.unwrap_or(6), 0, 0.5);
        let p = random_unit(&mut r, 2);
        let t = r.gen_range(1.0..tmax);
        let tv = pushforward_fn(&v, &ConformalParam::new(2, p, t)?, &g, &s);
        let e0 = hsigma_energy(&v, &s);
        let e1 = hsigma_energy(&sht_forward(&tv, lmax)?, &s);
        let n0 = sht_inverse(&v, &g)?.map(|x| x.abs().powf(q)).integral();
        let n1 = tv.map(|x| x.abs().powf(q)).integral();
        let (a, b) = ((e1 - e0).abs() / e0, (n1 - n0).abs() / n0);
        de = de.max(a);
        dn = dn.max(b);
        rows.push(row([i as f64, p[0], p[1], p[2], t, a, b]));
    }
    out.csv(
        &[
            "triple",
            "P1",
            "P2",
            "P3",
            "t",
            "energy_drift",
            "norm_drift",
        ],
        &rows,
    )?;
    out.json(&json!({"triples": count, "tmax": tmax, "energy_drift": de, "norm_drift": dn}))?;
    Ok(vec![
        Check::below(
            "energy invariance",
            de,
            1e-6,
            "T_phi preserves the H^sigma energy",
        ),
        Check::below(
            "critical norm invariance",
            dn,
            1e-6,
            "T_phi preserves the critical norm",
        ),
    ])
}

fn bubble_check(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    require_s2(&s, "bubble-check")?;
    let beta = o.beta.unwrap_or(1.5);
    let lmax = o.lmax.unwrap_or(64);
    let center = o.center.as_deref().map(from_slice).unwrap_or(basis(2));
    let b = config(Bubble::new(center, beta, &s))?;
    let res = bubble_residual(&b, lmax)?;
    let g = grid(o, (2 * lmax, 4 * lmax))?;
    let norm_err = (bubble_field(&b, &g)
        .map(|v| v.powf(s.critical_exponent()))
        .integral()
        - s.volume())
    .abs();
    out.json(&json!({"beta": beta, "lmax": lmax, "residual": res, "norm_error": norm_err}))?;
    Ok(vec![
        Check::below(
            "bubble equation residual",
            res,
            1e-8,
            "bubble solves the constant-curvature equation",
        ),
        Check::below(
            "bubble critical norm",
            norm_err,
            1e-8,
            "critical norm of a bubble",
        ),
    ])
}

fn interaction_scan(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    let betas = o.betas.clone().unwrap_or_else(|| vec![1.1, 1.05, 1.025]);
    if betas.is_empty() || betas.iter().any(|b| !(*b > 1.0)) {
        return Err(ConfigError("betas must be nonempty and > 1".into()).into());
    }
    let a = interaction_constant(&s);
    let mut rows = Vec::new();
    let mut errs = Vec::new();
    for &b in &betas {
        let i = interaction_integral(b, &s)?;
        let ratio = i / (b - 1.0).powf(s.weight());
        errs.push((ratio - a).abs() / a);
        rows.push(row([b, i, ratio]));
    }
    out.csv(&["beta", "integral", "ratio"], &rows)?;
    out.json(&json!({"A": a, "betas": betas, "relative_errors": errs}))?;
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().expect("nonempty");
    Ok(vec![
        Check::below(
            "ratio at smallest beta - 1",
            last,
            0.05,
            "interaction constant A",
        ),
        Check::new(
            monotone,
            "monotone approach",
            monotone.to_string(),
            "true".into(),
            "interaction constant A",
        ),
    ])
}

fn solution_row(r: &SolutionRecord) -> Vec<String> {
    let mut v = row([
        r.p,
        r.lambda,
        r.energy,
        r.el_residual,
        r.galerkin_residual,
        r.kw_residual,
        r.sup_over_mean,
    ]);
    v.push(r.converged.to_string());
    v
}

const SOLUTION_HEADER: [&str; 8] = [
    "p",
    "lambda",
    "energy",
    "el_residual",
    "galerkin_residual",
    "kw_residual",
    "sup_over_mean",
    "converged",
];

fn solve_k(
    o: &Opts,
    default_k: &str,
) -> Result<(FracOperatorSpec, Curvature, SolverConfig, SolutionRecord)> {
    let s = spec(o)?;
    require_s2(&s, "the solver")?;
    let k = curvature(o, &s, default_k)?;
    let cfg = solver_config(o, &k)?;
    let g = solver_grid(cfg.lmax)?;
    let kg = GridField::sample(&g, &k);
    let rec = minimize_subcritical(&kg, &cfg, &s)?;
    Ok((s, k, cfg, rec))
}

fn solve(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let (s, _, cfg, rec) = solve_k(o, "const")?;
    out.json(&json!({"config": cfg, "solution": rec.summary(s.sigma)}))?;
    out.csv(&SOLUTION_HEADER, &[solution_row(&rec)])?;
    let min = rec.grid_field.min();
    Ok(vec![
        Check::new(
            rec.converged,
            "Euler-Lagrange residual",
            format!(
                "{:.3e} (grid {:.3e})",
                rec.galerkin_residual, rec.el_residual
            ),
            format!("< {:.0e}", cfg.tol),
            "subcritical Euler-Lagrange equation",
        ),
        Check::new(
            min > 0.0,
            "positivity",
            format!("{min:.3e}"),
            "> 0".into(),
            "positive minimizer",
        ),
    ])
}

fn continuation(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    require_s2(&s, "continuation")?;
    let k = curvature(o, &s, "const")?;
    let cfg = solver_config(o, &k)?;
    let schedule = o
        .schedule
        .clone()
        .unwrap_or_else(|| vec![1.5, 2.0, 2.5, 2.9]);
    let g = solver_grid(cfg.lmax)?;
    let recs = continuation_to_critical(&GridField::sample(&g, &k), &schedule, &cfg, &s)?;
    let rows: Vec<Vec<String>> = recs.iter().map(solution_row).collect();
    out.csv(&SOLUTION_HEADER, &rows)?;
    let summaries: Vec<_> = recs.iter().map(|r| r.summary(s.sigma)).collect();
    out.json(&json!({"config": cfg, "schedule": schedule, "stages": summaries}))?;
    let done = recs.iter().filter(|r| r.converged).count();
    let mut checks = vec![Check::new(
        done == schedule.len(),
        "stages converged",
        done.to_string(),
        format!("= {}", schedule.len()),
        "subcritical Euler-Lagrange equation",
    )];
    if let Some(r) = recs
        .iter()
        .find(|r| r.sup_over_mean > cfg.concentration_threshold)
    {
        checks.push(Check::inconclusive(
            "concentration",
            format!("sup/mean {:.3} at p = {}", r.sup_over_mean, r.p),
            "probable blow-up",
        ));
    }
    Ok(checks)
}

fn kw_check(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let (s, k, cfg, rec) = solve_k(o, "even-band")?;
    let tol = if k.is_constant() { 1e-12 } else { 1e-4 };
    out.json(
        &json!({"config": cfg, "kw_residual": rec.kw_residual, "solution": rec.summary(s.sigma)}),
    )?;
    let mut checks = vec![Check::below(
        "Kazdan-Warner residual",
        rec.kw_residual,
        tol,
        "Kazdan-Warner identity",
    )];
    if !rec.converged {
        checks.push(Check::new(
            false,
            "solver converged",
            "false".into(),
            "true".into(),
            "subcritical Euler-Lagrange equation",
        ));
    }
    Ok(checks)
}

fn quotient_check(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    require_s2(&s, "quotient-check")?;
    let k = curvature(o, &s, "const")?;
    let g = grid(o, (128, 256))?;
    let beta = o.beta.unwrap_or(1.05);
    let center = o.center.as_deref().map(from_slice).unwrap_or(basis(2));
    if (norm(&center) - 1.0).abs() > 1e-10 {
        return Err(ConfigError("center must be a unit vector".into()).into());
    }
    let r = test_quotient(&GridField::sample(&g, &k), beta, &center, &s)?;
    out.json(&json!({"beta": beta, "quotient": r.quotient, "bound": r.bound, "margin": r.margin}))?;
    Ok(vec![Check::new(
        r.margin > 0.0,
        "test-function quotient",
        format!("{:.6} (bound {:.6})", r.quotient, r.bound),
        "margin > 0".into(),
        "test-function criterion",
    )])
}

fn aubin(o: &Opts, out: &Output, sobolev: bool) -> Result<Vec<Check>> {
    let s = spec(o)?;
    require_s2(&s, "the Aubin explorers")?;
    let d = AubinConfig::default();
    let cfg = AubinConfig {
        lmax: positive(o.lmax.unwrap_or(d.lmax), "lmax")?,
        iterations: o.iterations.unwrap_or(d.iterations),
        seed: o.seed.unwrap_or(0),
        ..d
    };
    let p = o.p.unwrap_or(3.0);
    let samples = positive(o.samples.unwrap_or(50), "samples")?;
    let r = if sobolev {
        aubin_sobolev_explore(p, o.a.unwrap_or(0.9), samples, &cfg, &s)?
    } else {
        aubin_explore(p, o.eps.unwrap_or(0.1), samples, &cfg, &s)?
    };
    out.json(&json!({"config": cfg, "report": r}))?;
    let label = if sobolev {
        "Sobolev-type inequality"
    } else {
        "improved Sobolev inequality"
    };
    Ok(vec![Check::new(
        r.violations == 0,
        "sampled violations",
        format!(
            "{} (empirical constant {:.6}, worst gap {:.3e})",
            r.violations, r.empirical_constant, r.worst_gap
        ),
        "= 0".into(),
        label,
    )])
}

fn poles(o: &Opts, n: usize, default_random: usize) -> Vec<Point> {
    let mut r = rng(o);
    let mut ps: Vec<Point> = (0..=n)
        .flat_map(|i| [basis(i), scale(&basis(i), -1.0)])
        .collect();
    for _ in 0..o.poles.unwrap_or(default_random) {
        ps.push(random_unit(&mut r, n));
    }
    ps
}

fn g_scan(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    let k = curvature(o, &s, "tilt")?;
    let rule = config(MomentRule::default_for(s.n))?;
    let ts = o
        .t_schedule
        .clone()
        .unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let n = s.n;
    let mut rows = Vec::new();
    let mut at_one: Vec<Point> = Vec::new();
    for p in poles(o, n, 4) {
        for &t in &ts {
            let g = config(g_map(&k, &p, t, &rule))?;
            if t == 1.0 {
                at_one.push(g);
            }
            let mut r: Vec<f64> = p[..=n].to_vec();
            r.push(t);
            r.extend_from_slice(&g[..=n]);
            r.push(norm(&g));
            rows.push(row(r));
        }
    }
    let mut header: Vec<String> = (1..=n + 1).map(|i| format!("P{i}")).collect();
    header.push("t".into());
    header.extend((1..=n + 1).map(|i| format!("G{i}")));
    header.push("norm_G".into());
    out.csv(
        &header.iter().map(String::as_str).collect::<Vec<_>>(),
        &rows,
    )?;
    let spread = at_one
        .iter()
        .flat_map(|g| {
            at_one
                .iter()
                .map(move |h| norm(&fracnir::sphere::point::sub(g, h)))
        })
        .fold(0.0, f64::max);
    out.json(&json!({"t_schedule": ts, "rows": rows.len(), "spread_at_t1": spread}))?;
    let mut checks = Vec::new();
    if !at_one.is_empty() {
        checks.push(Check::below(
            "G(P,1) independent of P",
            spread,
            1e-12,
            "moment identity at t = 1",
        ));
    }
    Ok(checks)
}

fn degree(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    let k = curvature(o, &s, "tilt")?;
    let radius = o.s.unwrap_or(0.9);
    let n = s.n;
    let tri = config(Triangulation::cube_sphere(
        n,
        o.subdivisions.unwrap_or(if n == 2 { 8 } else { 4 }),
    ))?;
    let method = match o.method.as_deref() {
        None if n == 2 => DegreeMethod::Area,
        None | Some("preimage") => DegreeMethod::Preimage,
        Some("area") => DegreeMethod::Area,
        Some(m) => return Err(ConfigError(format!("unknown method '{m}'")).into()),
    };
    let rule = config(MomentRule::default_for(n))?;
    let r = brouwer_degree(&k, radius, &tri, &rule, method)?;
    let mut rows = Vec::new();
    for p in tri.vertices() {
        let g = g_map(&k, p, r.t, &rule)?;
        let mut v: Vec<f64> = p[..=n].to_vec();
        v.push(r.t);
        v.extend_from_slice(&g[..=n]);
        v.push(norm(&g));
        rows.push(row(v));
    }
    let mut header: Vec<String> = (1..=n + 1).map(|i| format!("P{i}")).collect();
    header.push("t".into());
    header.extend((1..=n + 1).map(|i| format!("G{i}")));
    header.push("norm_G".into());
    out.csv(
        &header.iter().map(String::as_str).collect::<Vec<_>>(),
        &rows,
    )?;
    out.json(&r)?;
    Ok(vec![match r.degree {
        Some(d) => Check::new(
            true,
            "degree",
            format!("{d} (min |G| {:.3e})", r.min_norm),
            format!("min |G| > {:.3e}", r.threshold),
            "degree of the moment map",
        ),
        None => Check::inconclusive(
            "degree",
            format!(
                "min |G| {:.3e} below zero-exclusion threshold {:.3e}",
                r.min_norm, r.threshold
            ),
            "degree of the moment map",
        ),
    }])
}

fn index(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    let k = match o.k_preset.as_deref() {
        Some("model") => Some(curvature(o, &s, "model")?),
        _ => None,
    };
    let models: Vec<CriticalPointModel> = match (&o.critical_points, &o.models, &k) {
        (Some(m), _, _) => m.clone(),
        (None, Some(p), _) => read_json(p)?,
        (None, None, Some(Curvature::Model(m))) => m.models.clone(),
        _ => {
            return Err(ConfigError(
                "index-count needs critical_points, --models or a model curvature".into(),
            )
            .into())
        }
    };
    let ic = index_count(&models, s.n).map_err(|e| ConfigError(e.to_string()))?;
    if !ic.complete {
        eprintln!(
            "warning: Σ(−1)^i over the models is {}, not χ(S^{}) = {}; the list is not a complete Morse description",
            ic.euler_sum,
            s.n,
            1 + if s.n % 2 == 0 { 1 } else { -1 }
        );
    }
    let mut report = json!({"index": ic});
    let mut checks = vec![Check::new(
        true,
        "index count",
        format!(
            "sum {} criterion {} predicted degree {}",
            ic.sum, ic.criterion, ic.predicted_degree
        ),
        "-".into(),
        "index formula",
    )];
    if let Some(k) = k {
        let tri = Triangulation::cube_sphere(
            s.n,
            o.subdivisions.unwrap_or(if s.n == 2 { 8 } else { 4 }),
        )?;
        let method = if s.n == 2 {
            DegreeMethod::Area
        } else {
            DegreeMethod::Preimage
        };
        let r = brouwer_degree(
            &k,
            o.s.unwrap_or(0.9),
            &tri,
            &MomentRule::default_for(s.n)?,
            method,
        )?;
        checks.push(match r.degree {
            Some(d) => Check::new(
                d == ic.predicted_degree,
                "numeric degree of glued model",
                d.to_string(),
                format!("= {}", ic.predicted_degree),
                "index formula for the degree",
            ),
            None => Check::inconclusive(
                "numeric degree of glued model",
                "zero exclusion failed".into(),
                "index formula",
            ),
        });
        report["degree"] = serde_json::to_value(&r)?;
    }
    out.json(&report)?;
    Ok(checks)
}

fn omega_scan(o: &Opts, out: &Output) -> Result<Vec<Check>> {
    let s = spec(o)?;
    let k = curvature(o, &s, "tilt")?;
    let rule = config(MomentRule::default_for(s.n))?;
    let ts = o.t_schedule.clone().unwrap_or_else(|| vec![4.0, 8.0, 16.0]);
    let ps = poles(o, s.n, 2);
    let rows = config(omega_decay_scan(&k, &ps, &ts, &rule))?;
    let n = s.n;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = r.pole.clone();
            v.extend([r.t, r.deviation, r.moment, r.ratio]);
            row(v)
        })
        .collect();
    let mut header: Vec<String> = (1..=n + 1).map(|i| format!("P{i}")).collect();
    header.extend(["t", "deviation", "moment", "ratio"].map(String::from));
    out.csv(
        &header.iter().map(String::as_str).collect::<Vec<_>>(),
        &csv_rows,
    )?;
    out.json(&json!({"t_schedule": ts, "rows": rows}))?;
    if rows.is_empty() {
        return Ok(vec![Check::inconclusive(
            "omega scan",
            "no pair with nonzero moment".into(),
            "decay of omega(t)",
        )]);
    }
    let ok = rows.iter().all(|r| r.ratio.is_finite() && r.ratio >= 0.0);
    Ok(vec![Check::new(
        ok,
        "ratios finite and nonnegative",
        rows.len().to_string(),
        "all rows".into(),
        "decay of omega(t)",
    )])
}

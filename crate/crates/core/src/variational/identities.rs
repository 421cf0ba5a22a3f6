use crate::fracop::{hsigma_energy, FracOperatorSpec};
use crate::sphere::point::{Point, ZERO};
use crate::sphere::{sht_forward, synthesize_jet, GridField};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Tangential gradient of a sampled `S^2` field at every node, by exact
/// differentiation of its harmonic expansion at the grid's full band limit.
pub fn tangential_gradient(f: &GridField) -> Result<Vec<Point>> {
    let g = f.grid();
    if g.dim() != 2 {
        return Err(Error::UnsupportedDimension(g.dim()));
    }
    let lmax = (g.polar() - 1).min((g.azimuthal() - 1) / 2);
    let c = sht_forward(f, lmax)?;
    Ok(synthesize_jet(&c, g)?
        .iter()
        .map(|j| j.ambient_gradient())
        .collect())
}

/// `∫ ⟨∇K, ∇x_i⟩ |v|^{2n/(n−2σ)}` for `i = 1..n+1`, using `∇x_i = e_i − x_i x`
/// so that `⟨∇K, ∇x_i⟩` is the `i`-th component of the tangential gradient.
pub fn kw_vector(v: &GridField, k: &GridField, spec: &FracOperatorSpec) -> Result<Point> {
    v.check_same_grid(k)?;
    let q = spec.critical_exponent();
    let grad = tangential_gradient(k)?;
    let mut out = ZERO;
    for ((gk, w), vv) in grad.iter().zip(v.grid().weights()).zip(v.values()) {
        let d = w * vv.abs().powf(q);
        for i in 0..4 {
            out[i] += d * gk[i];
        }
    }
    Ok(out)
}

/// Euclidean norm of [`kw_vector`]. Vanishes on solutions of
/// `P_σ v = K v^{(n+2σ)/(n−2σ)}`.
pub fn kw_residual(v: &GridField, k: &GridField, spec: &FracOperatorSpec) -> Result<f64> {
    let r = kw_vector(v, k, spec)?;
    Ok(r.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Scale `max|∇K| · ∫|v|^{2n/(n−2σ)}` against which [`kw_residual`] is judged.
pub fn kw_scale(v: &GridField, k: &GridField, spec: &FracOperatorSpec) -> Result<f64> {
    let q = spec.critical_exponent();
    let gmax = tangential_gradient(k)?
        .iter()
        .map(|g| g.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok(gmax * v.map(|x| x.abs().powf(q)).integral())
}

/// `G_{ij} = ∫ ⟨∇x_i, ∇x_j⟩ |v|^{2n/(n−2σ)} = ∫ (δ_{ij} − x_i x_j) |v|^{2n/(n−2σ)}`.
pub fn gram_matrix(v: &GridField, spec: &FracOperatorSpec) -> DMatrix<f64> {
    let n = v.grid().dim();
    let q = spec.critical_exponent();
    let mut g = DMatrix::zeros(n + 1, n + 1);
    for ((x, w), vv) in v
        .grid()
        .nodes()
        .iter()
        .zip(v.grid().weights())
        .zip(v.values())
    {
        let d = w * vv.abs().powf(q);
        for i in 0..=n {
            for j in 0..=n {
                let delta = if i == j { 1.0 } else { 0.0 };
                g[(i, j)] += d * (delta - x[i] * x[j]);
            }
        }
    }
    g
}

/// Multipliers of `P_σ v = λ K v^{(n+2σ)/(n−2σ)} + Λ·(…)`: `λ = ∫vP_σv / ∫K|v|^q`
/// and `Λ` from `Σ_j Λ_j G_{ij} = λ ∫⟨∇K, ∇x_i⟩|v|^q`, solved by Cholesky
/// (which also certifies `G` positive definite).
pub fn multiplier_solve(
    v: &GridField,
    k: &GridField,
    spec: &FracOperatorSpec,
) -> Result<(f64, Point)> {
    v.check_same_grid(k)?;
    let g = v.grid();
    let lmax = (g.polar() - 1).min((g.azimuthal() - 1) / 2);
    let q = spec.critical_exponent();
    let energy = hsigma_energy(&sht_forward(v, lmax)?, spec);
    let den = v.zip_with(k, |v, k| k * v.abs().powf(q))?.integral();
    if !(den.abs() > 0.0) {
        return Err(Error::Undefined("∫K|v|^q vanishes".into()));
    }
    let lambda = energy / den;
    let n = g.dim();
    let kw = kw_vector(v, k, spec)?;
    let rhs = DVector::from_iterator(n + 1, kw[..=n].iter().map(|x| lambda * x));
    let chol = gram_matrix(v, spec).cholesky().ok_or_else(|| {
        Error::SingularMatrix("Gram matrix ∫⟨∇x_i,∇x_j⟩|v|^q is not positive definite".into())
    })?;
    let sol = chol.solve(&rhs);
    let mut big = ZERO;
    for i in 0..=n {
        big[i] = sol[i];
    }
    Ok((lambda, big))
}

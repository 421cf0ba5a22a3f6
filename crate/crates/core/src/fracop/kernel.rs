//! Direct kernel summation for the singular-integral form of `P_σ` and the
//! Riesz potential on `S^2`.
//!
//! Both integrands are desingularized by subtracting a second-order Taylor
//! surrogate `u(ζ) = v(ξ) + g·s + ½ sᵀHs`, with `s = (ζ·e_θ, ζ·e_ψ)` the
//! tangential coordinates of `ζ` at the target `ξ`. The surrogate part is
//! integrated in closed form against the zonal kernel; the remainder
//! `v − u = O(|ξ−ζ|³)` is smooth enough for the product Gauss rule, with the
//! self node dropped. Value, gradient and Hessian at the target come from
//! exact differentiation of the field's harmonic expansion.

use super::FracOperatorSpec;
use crate::sphere::point::Point;
use crate::sphere::{sht_forward, synthesize_jet, GridField, LocalJet, SpectralField, SphereGrid};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// Relative L² error allowed on the degree-one probe before a grid is
/// declared too coarse.
pub const PROBE_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, Default)]
struct RingMoments {
    m0: f64,
    m1: [f64; 2],
    m2: [[f64; 2]; 2],
}

/// Weighted samples of `|ξ − ζ|^{−2e}` for every target ring and source
/// node, exploiting invariance under rotation about the polar axis.
struct ZonalTable {
    grid: Arc<SphereGrid>,
    table: Vec<f64>,
    moments: Vec<RingMoments>,
    /// `∫ |ξ−ζ|^{−2e} dζ`, finite only for `e < 1`.
    z0: f64,
    /// `½ ∫ (1 − (ξ·ζ)²) |ξ−ζ|^{−2e} dζ`.
    z2: f64,
}

impl ZonalTable {
    fn new(grid: &Arc<SphereGrid>, e: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::UnsupportedDimension(grid.dim()));
        }
        let nt = grid.polar();
        let na = grid.azimuthal();
        let ct = grid.cos_theta();
        let st: Vec<f64> = ct.iter().map(|c| (1.0 - c * c).sqrt()).collect();
        let (cpsi, spsi): (Vec<f64>, Vec<f64>) = (0..na)
            .map(|j| grid.psi(j))
            .map(|p| (p.cos(), p.sin()))
            .unzip();
        let ring_w: Vec<f64> = grid
            .polar_weights()
            .iter()
            .map(|w| w * 2.0 * PI / na as f64)
            .collect();
        let mut table = vec![0.0; nt * nt * na];
        let mut moments = vec![RingMoments::default(); nt];
        for a in 0..nt {
            let e_theta = [ct[a], 0.0, -st[a]];
            let mut mom = RingMoments::default();
            for b in 0..nt {
                let row = &mut table[(a * nt + b) * na..(a * nt + b + 1) * na];
                for d in 0..na {
                    if a == b && d == 0 {
                        continue;
                    }
                    let z = [st[b] * cpsi[d], st[b] * spsi[d], ct[b]];
                    let d2 = (st[a] - z[0]).powi(2) + z[1] * z[1] + (ct[a] - z[2]).powi(2);
                    let k = ring_w[b] * d2.powf(-e);
                    row[d] = k;
                    let s = [z[0] * e_theta[0] + z[2] * e_theta[2], z[1]];
                    mom.m0 += k;
                    for i in 0..2 {
                        mom.m1[i] += k * s[i];
                        for j in 0..2 {
                            mom.m2[i][j] += k * s[i] * s[j];
                        }
                    }
                }
            }
            moments[a] = mom;
        }
        let z0 = if e < 1.0 {
            2.0 * PI * 2f64.powf(1.0 - 2.0 * e) / (1.0 - e)
        } else {
            f64::INFINITY
        };
        let z2 = PI * 2f64.powf(3.0 - 2.0 * e) / ((2.0 - e) * (3.0 - e));
        Ok(ZonalTable {
            grid: grid.clone(),
            table,
            moments,
            z0,
            z2,
        })
    }

    /// `Σ_ζ w_ζ K(ξ, ζ) f(ζ)` at every node, self term excluded.
    fn sum(&self, f: &[f64]) -> Vec<f64> {
        let nt = self.grid.polar();
        let na = self.grid.azimuthal();
        let mut out = vec![0.0; nt * na];
        for a in 0..nt {
            let acc = &mut out[a * na..(a + 1) * na];
            for b in 0..nt {
                let t = &self.table[(a * nt + b) * na..(a * nt + b + 1) * na];
                let fb = &f[b * na..(b + 1) * na];
                for (p, slot) in acc.iter_mut().enumerate() {
                    // q ≥ p uses offsets 0..na−p, q < p uses na−p..na
                    let (hi_t, lo_t) = t.split_at(na - p);
                    let mut s = 0.0;
                    for (tk, fk) in hi_t.iter().zip(&fb[p..]) {
                        s += tk * fk;
                    }
                    for (tk, fk) in lo_t.iter().zip(&fb[..p]) {
                        s += tk * fk;
                    }
                    *slot += s;
                }
            }
        }
        out
    }

    /// `Σ_ζ w_ζ K(ξ, ζ) u_ξ(ζ)` for the Taylor surrogate at node `(a, ·)`.
    fn surrogate_sum(&self, ring: usize, jet: &LocalJet) -> f64 {
        let m = &self.moments[ring];
        let mut s = jet.value * m.m0;
        for i in 0..2 {
            s += jet.grad[i] * m.m1[i];
            for j in 0..2 {
                s += 0.5 * jet.hess[i][j] * m.m2[i][j];
            }
        }
        s
    }
}

fn jets_of(v: &GridField) -> Result<Vec<LocalJet>> {
    let g = v.grid();
    let lmax = (g.polar() - 1).min((g.azimuthal() - 1) / 2);
    let c = sht_forward(v, lmax)?;
    synthesize_jet(&c, g)
}

fn probe_field(grid: &Arc<SphereGrid>) -> GridField {
    GridField::sample(grid, &|x: &Point| x[2])
}

fn relative_l2(a: &GridField, b: &GridField) -> f64 {
    let diff = a.zip_with(b, |x, y| x - y).expect("same grid");
    diff.l2_norm() / b.l2_norm()
}

/// Singular-integral realization
/// `P_σ v(ξ) = P_σ(1) v(ξ) + c_{n,−σ} PV∫ (v(ξ) − v(ζ)) / |ξ−ζ|^{n+2σ} dζ` on `S^2`.
pub struct SingularOperator {
    spec: FracOperatorSpec,
    table: ZonalTable,
}

impl SingularOperator {
    pub fn new(grid: &Arc<SphereGrid>, spec: &FracOperatorSpec) -> Result<Self> {
        spec.require_s2()?;
        Ok(SingularOperator {
            spec: *spec,
            table: ZonalTable::new(grid, 1.0 + spec.sigma)?,
        })
    }

    pub fn apply(&self, v: &GridField) -> Result<GridField> {
        v.check_same_grid(&GridField::constant(&self.table.grid, 0.0))?;
        self.apply_with_jets(v, &jets_of(v)?)
    }

    /// Apply to a band-limited field, using its exact derivatives.
    pub fn apply_band_limited(&self, c: &SpectralField) -> Result<GridField> {
        let jets = synthesize_jet(c, &self.table.grid)?;
        let v = GridField::new(
            self.table.grid.clone(),
            jets.iter().map(|j| j.value).collect(),
        )?;
        self.apply_with_jets(&v, &jets)
    }

    fn apply_with_jets(&self, v: &GridField, jets: &[LocalJet]) -> Result<GridField> {
        let t = &self.table;
        let na = t.grid.azimuthal();
        let s = t.sum(v.values());
        let c = self.spec.singular_constant();
        let p1 = self.spec.p_one();
        let out = jets
            .iter()
            .zip(&s)
            .enumerate()
            .map(|(idx, (j, sv))| {
                let analytic = -j.laplacian() * t.z2 * 0.5;
                let remainder = t.surrogate_sum(idx / na, j) - sv;
                p1 * j.value + c * (analytic + remainder)
            })
            .collect();
        GridField::new(t.grid.clone(), out)
    }

    /// Relative L² error on `x₃`, whose exact image is `λ₁ x₃`.
    pub fn probe(&self) -> Result<f64> {
        let f = probe_field(&self.table.grid);
        let got = self.apply(&f)?;
        Ok(relative_l2(&got, &f.map(|x| x * self.spec.eigenvalue(1))))
    }
}

/// Singular-integral `P_σ v` after checking the grid on the degree-one probe.
pub fn apply_ps_singular(v: &GridField, spec: &FracOperatorSpec) -> Result<GridField> {
    let op = SingularOperator::new(v.grid(), spec)?;
    let err = op.probe()?;
    if err > PROBE_TOLERANCE {
        return Err(Error::ResolutionTooCoarse(format!(
            "degree-one probe error {err:.3e} exceeds {PROBE_TOLERANCE:e}"
        )));
    }
    op.apply(v)
}

/// Riesz potential
/// `R_{2σ} f(ξ) = Γ((n−2σ)/2)/(2^{2σ}π^{n/2}Γ(σ)) ∫ f(ζ) |ξ−ζ|^{−(n−2σ)} dζ` on `S^2`.
pub struct RieszOperator {
    spec: FracOperatorSpec,
    table: ZonalTable,
}

impl RieszOperator {
    pub fn new(grid: &Arc<SphereGrid>, spec: &FracOperatorSpec) -> Result<Self> {
        spec.require_s2()?;
        Ok(RieszOperator {
            spec: *spec,
            table: ZonalTable::new(grid, 1.0 - spec.sigma)?,
        })
    }

    pub fn apply(&self, f: &GridField) -> Result<GridField> {
        f.check_same_grid(&GridField::constant(&self.table.grid, 0.0))?;
        let jets = jets_of(f)?;
        let t = &self.table;
        let na = t.grid.azimuthal();
        let s = t.sum(f.values());
        let c = self.spec.riesz_constant();
        let out = jets
            .iter()
            .zip(&s)
            .enumerate()
            .map(|(idx, (j, sf))| {
                let analytic = j.value * t.z0 + 0.5 * j.laplacian() * t.z2;
                c * (analytic + sf - t.surrogate_sum(idx / na, j))
            })
            .collect();
        GridField::new(t.grid.clone(), out)
    }

    /// Relative L² error on `x₃`, whose exact image is `x₃ / λ₁`.
    pub fn probe(&self) -> Result<f64> {
        let f = probe_field(&self.table.grid);
        let got = self.apply(&f)?;
        Ok(relative_l2(&got, &f.map(|x| x / self.spec.eigenvalue(1))))
    }
}

/// Riesz potential after checking the grid on the degree-one probe.
pub fn riesz_potential(f: &GridField, spec: &FracOperatorSpec) -> Result<GridField> {
    let op = RieszOperator::new(f.grid(), spec)?;
    let err = op.probe()?;
    if err > PROBE_TOLERANCE {
        return Err(Error::ResolutionTooCoarse(format!(
            "degree-one probe error {err:.3e} exceeds {PROBE_TOLERANCE:e}"
        )));
    }
    op.apply(f)
}

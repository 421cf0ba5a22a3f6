use crate::fracop::FracOperatorSpec;
use crate::sphere::point::{complement_frame, dot, from_slice, geodesic_distance, norm, Point};
use crate::sphere::SphereFn;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Normal form `K(x) = K(ξ) + Σ_j a_j |y_j|^β` near a critical point `ξ`,
/// with `y` the coordinates of `x` along the frame complementing `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointModel {
    pub location: Vec<f64>,
    /// Flatness exponent.
    pub beta: f64,
    #[serde(rename = "a")]
    pub coeffs: Vec<f64>,
}

impl CriticalPointModel {
    pub fn new(location: &[f64], beta: f64, coeffs: &[f64]) -> Self {
        CriticalPointModel {
            location: location.to_vec(),
            beta,
            coeffs: coeffs.to_vec(),
        }
    }

    /// `i(ξ) = #{j : a_j < 0}`
    pub fn index(&self) -> usize {
        self.coeffs.iter().filter(|&&a| a < 0.0).count()
    }

    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn point(&self) -> Point {
        from_slice(&self.location)
    }

    fn check_shape(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.location.len() != n + 1 {
            return bad(format!(
                "location has {} coordinates, expected {}",
                self.location.len(),
                n + 1
            ));
        }
        if (norm(&self.point()) - 1.0).abs() > 1e-10 {
            return bad("location is not a unit vector".into());
        }
        if self.coeffs.len() != n {
            return bad(format!("{} coefficients, expected {n}", self.coeffs.len()));
        }
        if self.coeffs.iter().any(|&a| a == 0.0 || !a.is_finite()) {
            return bad("coefficients must be finite and nonzero".into());
        }
        if self.coeff_sum() == 0.0 {
            return bad("coefficient sum must be nonzero".into());
        }
        Ok(())
    }

    /// Shape checks plus `n − 2σ < β < n`.
    pub fn validate(&self, spec: &FracOperatorSpec) -> Result<()> {
        self.check_shape(spec.n)?;
        let (lo, hi) = (spec.n as f64 - 2.0 * spec.sigma, spec.n as f64);
        if !(self.beta > lo && self.beta < hi) {
            return Err(Error::InvalidModel(format!(
                "β = {} is not in ({lo}, {hi})",
                self.beta
            )));
        }
        Ok(())
    }
}

fn check_distinct(models: &[CriticalPointModel]) -> Result<()> {
    for (i, a) in models.iter().enumerate() {
        for b in &models[i + 1..] {
            if geodesic_distance(&a.point(), &b.point()) < 1e-9 {
                return Err(Error::InvalidModel("two models share a location".into()));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexCount {
    /// `Σ_{Σa_j < 0} (−1)^{i(ξ)}`
    pub sum: i64,
    /// `sum ≠ (−1)^n`
    pub criterion: bool,
    /// `sum − (−1)^n`, the degree the moment map should have.
    pub predicted_degree: i64,
    /// `Σ (−1)^{i(ξ)}` over all models.
    pub euler_sum: i64,
    /// Whether `euler_sum = χ(S^n)`; a list failing this cannot describe
    /// every critical point of a Morse function.
    pub complete: bool,
}

pub fn index_count(models: &[CriticalPointModel], n: usize) -> Result<IndexCount> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    for m in models {
        m.check_shape(n)?;
    }
    check_distinct(models)?;
    let sign = |i: usize| if i % 2 == 0 { 1 } else { -1 };
    let sum = models
        .iter()
        .filter(|m| m.coeff_sum() < 0.0)
        .map(|m| sign(m.index()))
        .sum();
    let euler_sum: i64 = models.iter().map(|m| sign(m.index())).sum();
    let chi = 1 + sign(n);
    Ok(IndexCount {
        sum,
        criterion: sum != sign(n),
        predicted_degree: sum - sign(n),
        euler_sum,
        complete: euler_sum == chi,
    })
}

/// Curvature realizing a list of critical-point models: a base function
/// `c + ⟨b, x⟩ + Σ q_i x_i²`, replaced near each `ξ` by its normal form
/// through a `C^{1,1}` cutoff in the geodesic distance, equal to 1 on the
/// inner half of a cap of radius `cap_radius` and 0 outside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelK {
    pub n: usize,
    #[serde(default = "one")]
    pub constant: f64,
    #[serde(default)]
    pub linear: Vec<f64>,
    #[serde(default)]
    pub quadratic: Vec<f64>,
    pub models: Vec<CriticalPointModel>,
    #[serde(default = "default_cap")]
    pub cap_radius: f64,
    #[serde(skip)]
    frames: Vec<Vec<Point>>,
}

fn one() -> f64 {
    1.0
}

fn default_cap() -> f64 {
    0.6
}

impl ModelK {
    pub fn new(
        spec: &FracOperatorSpec,
        constant: f64,
        linear: &[f64],
        quadratic: &[f64],
        models: Vec<CriticalPointModel>,
        cap_radius: f64,
    ) -> Result<Self> {
        let k = ModelK {
            n: spec.n,
            constant,
            linear: linear.to_vec(),
            quadratic: quadratic.to_vec(),
            models,
            cap_radius,
            frames: Vec::new(),
        };
        k.prepared(spec)
    }

    /// Validate and build the local frames; needed after deserialization.
    pub fn prepared(mut self, spec: &FracOperatorSpec) -> Result<Self> {
        let n = spec.n;
        if self.n != n {
            return Err(Error::InvalidModel(format!(
                "model is for n = {}, operator for n = {n}",
                self.n
            )));
        }
        for v in [&self.linear, &self.quadratic] {
            if !(v.is_empty() || v.len() == n + 1) {
                return Err(Error::InvalidModel(format!(
                    "base coefficients need {} entries",
                    n + 1
                )));
            }
        }
        if !(self.cap_radius > 0.0 && self.cap_radius < std::f64::consts::PI / 2.0) {
            return Err(Error::InvalidModel("cap radius must be in (0, π/2)".into()));
        }
        for m in &self.models {
            m.validate(spec)?;
        }
        check_distinct(&self.models)?;
        for (i, a) in self.models.iter().enumerate() {
            for b in &self.models[i + 1..] {
                if geodesic_distance(&a.point(), &b.point()) < 2.0 * self.cap_radius {
                    return Err(Error::InvalidModel("caps overlap".into()));
                }
            }
        }
        self.frames = self
            .models
            .iter()
            .map(|m| complement_frame(&m.point(), n))
            .collect();
        Ok(self)
    }

    pub fn base(&self, x: &Point) -> f64 {
        let lin: f64 = self.linear.iter().zip(x).map(|(b, x)| b * x).sum();
        let quad: f64 = self.quadratic.iter().zip(x).map(|(q, x)| q * x * x).sum();
        self.constant + lin + quad
    }
}

fn cutoff(d: f64, r: f64) -> f64 {
    if d <= 0.5 * r {
        1.0
    } else if d >= r {
        0.0
    } else {
        let s = (d - 0.5 * r) / (0.5 * r);
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

impl SphereFn for ModelK {
    fn value(&self, x: &Point) -> f64 {
        assert_eq!(
            self.frames.len(),
            self.models.len(),
            "ModelK used before prepared()"
        );
        let b = self.base(x);
        let mut k = b;
        for (m, frame) in self.models.iter().zip(&self.frames) {
            let xi = m.point();
            let chi = cutoff(geodesic_distance(x, &xi), self.cap_radius);
            if chi > 0.0 {
                let local: f64 = self.base(&xi)
                    + m.coeffs
                        .iter()
                        .zip(frame)
                        .map(|(a, e)| a * dot(x, e).abs().powf(m.beta))
                        .sum::<f64>();
                k += chi * (local - b);
            }
        }
        k
    }
}

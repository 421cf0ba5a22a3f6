//! Named curvature functions used throughout the examples and the CLI.

use crate::sphere::point::{axpy, basis, dot, scale, Point};
use crate::sphere::SphereFn;

/// `1`, `1 + ε x_{n+1}`, `1 + ε x_{n+1}²` and constant multiples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    Const { c: f64 },
    Tilt { n: usize, eps: f64 },
    EvenBand { n: usize, eps: f64 },
}

impl Preset {
    fn axis(&self) -> usize {
        match *self {
            Preset::Const { .. } => 0,
            Preset::Tilt { n, .. } | Preset::EvenBand { n, .. } => n,
        }
    }

    /// Whether `K(−x) = K(x)`.
    pub fn is_even(&self) -> bool {
        !matches!(self, Preset::Tilt { eps, .. } if *eps != 0.0)
    }
}

impl SphereFn for Preset {
    fn value(&self, x: &Point) -> f64 {
        match *self {
            Preset::Const { c } => c,
            Preset::Tilt { eps, .. } => 1.0 + eps * x[self.axis()],
            Preset::EvenBand { eps, .. } => 1.0 + eps * x[self.axis()].powi(2),
        }
    }

    fn gradient(&self, x: &Point, _n: usize) -> Point {
        let e = basis(self.axis());
        let amb = match *self {
            Preset::Const { .. } => return [0.0; 4],
            Preset::Tilt { eps, .. } => scale(&e, eps),
            Preset::EvenBand { eps, .. } => scale(&e, 2.0 * eps * x[self.axis()]),
        };
        axpy(&amb, -dot(&amb, x), x)
    }
}

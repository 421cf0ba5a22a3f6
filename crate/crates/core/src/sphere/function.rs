use super::point::{axpy, complement_frame, scale, Point, ZERO};

/// A real function on `S^n` that can be evaluated at arbitrary points.
pub trait SphereFn {
    fn value(&self, x: &Point) -> f64;

    /// Tangential gradient at `x ∈ S^n`, as an ambient vector.
    fn gradient(&self, x: &Point, n: usize) -> Point {
        numeric_gradient(self, x, n)
    }
}

impl<F: Fn(&Point) -> f64> SphereFn for F {
    fn value(&self, x: &Point) -> f64 {
        self(x)
    }
}

/// Central differences along great circles through `x`.
pub fn numeric_gradient<F: SphereFn + ?Sized>(f: &F, x: &Point, n: usize) -> Point {
    let h: f64 = 1e-5;
    let (s, c) = h.sin_cos();
    let mut g = ZERO;
    for e in complement_frame(x, n) {
        let plus = axpy(&scale(x, c), s, &e);
        let minus = axpy(&scale(x, c), -s, &e);
        let d = (f.value(&plus) - f.value(&minus)) / (2.0 * h);
        g = axpy(&g, d, &e);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::point::{dot, normalize};

    #[test]
    fn closure_gradient_is_tangential_projection() {
        let f = |x: &Point| x[2] + 0.5 * x[0] * x[1];
        let x = normalize(&[0.3, -0.2, 0.9, 0.0]);
        let g = f.gradient(&x, 2);
        let amb = [0.5 * x[1], 0.5 * x[0], 1.0, 0.0];
        let want = axpy(&amb, -dot(&amb, &x), &x);
        for i in 0..4 {
            assert!((g[i] - want[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_on_s3() {
        let f = |x: &Point| x[3] * x[3];
        let x = normalize(&[0.3, -0.2, 0.4, 0.5]);
        let g = f.gradient(&x, 3);
        let amb = [0.0, 0.0, 0.0, 2.0 * x[3]];
        let want = axpy(&amb, -dot(&amb, &x), &x);
        for i in 0..4 {
            assert!((g[i] - want[i]).abs() < 1e-9);
        }
    }
}

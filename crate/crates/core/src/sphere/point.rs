//! Fixed-size ambient vectors.
//!
//! Points of `S^n ⊂ R^{n+1}` for `n ≤ 3` are stored as `[f64; 4]`; for `n = 2`
//! the last component is zero, so dot products and norms need no dimension.

pub type Point = [f64; 4];

pub const ZERO: Point = [0.0; 4];

/// The `i`-th standard basis vector.
pub fn basis(i: usize) -> Point {
    let mut e = ZERO;
    e[i] = 1.0;
    e
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

/// `a + s·b`
#[inline]
pub fn axpy(a: &Point, s: f64, b: &Point) -> Point {
    [
        a[0] + s * b[0],
        a[1] + s * b[1],
        a[2] + s * b[2],
        a[3] + s * b[3],
    ]
}

pub fn normalize(a: &Point) -> Point {
    scale(a, 1.0 / norm(a))
}

/// Component of `v` orthogonal to the unit vector `x`.
#[inline]
pub fn tangential(x: &Point, v: &Point) -> Point {
    axpy(v, -dot(x, v), x)
}

/// Build a point of `R^{n+1}` from a slice of length `≤ 4`.
pub fn from_slice(v: &[f64]) -> Point {
    let mut p = ZERO;
    p[..v.len()].copy_from_slice(v);
    p
}

/// Geodesic distance between two unit vectors, stable near 0 and π.
pub fn geodesic_distance(a: &Point, b: &Point) -> f64 {
    let s = norm(&sub(a, b));
    let c = norm(&add(a, b));
    2.0 * s.atan2(c)
}

/// Orthonormal basis of the orthogonal complement of the unit vector `p`
/// inside `R^{n+1}` (so `n` vectors), by Gram–Schmidt on the coordinate axes.
pub fn complement_frame(p: &Point, n: usize) -> Vec<Point> {
    let mut frame: Vec<Point> = Vec::with_capacity(n);
    // Start from the axes least aligned with p.
    let mut axes: Vec<usize> = (0..=n).collect();
    axes.sort_by(|&i, &j| p[i].abs().partial_cmp(&p[j].abs()).unwrap());
    for &i in &axes {
        if frame.len() == n {
            break;
        }
        let mut v = basis(i);
        v = axpy(&v, -dot(&v, p), p);
        for f in &frame {
            v = axpy(&v, -dot(&v, f), f);
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            frame.push(scale(&v, 1.0 / nv));
        }
    }
    frame
}

/// Determinant of the `k×k` matrix whose columns are the first `k`
/// coordinates of the given vectors (`k = cols.len() ≤ 4`).
pub fn det(cols: &[Point]) -> f64 {
    let k = cols.len();
    let mut m = [[0.0f64; 4]; 4];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..k {
            m[i][j] = c[i];
        }
    }
    let mut d = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..k {
            let f = m[r][col] / m[col][col];
            for c in col..k {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    d
}

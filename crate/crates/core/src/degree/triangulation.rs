use crate::sphere::point::{det, normalize, sub, Point, ZERO};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Triangulation of `S^n` (`n = 2, 3`) obtained by radially projecting the
/// boundary of the cube `[−1,1]^{n+1}`, each facet cut into `k^n` cubes and
/// each cube into `n!` Kuhn simplices. Simplices are oriented as the
/// boundary of the ball.
#[derive(Clone, Debug)]
pub struct Triangulation {
    n: usize,
    subdivisions: usize,
    vertices: Vec<Point>,
    simplices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationDescriptor {
    pub kind: String,
    pub n: usize,
    pub subdivisions: usize,
    pub vertices: usize,
    pub simplices: usize,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

impl Triangulation {
    pub fn cube_sphere(n: usize, subdivisions: usize) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::UnsupportedDimension(n));
        }
        if subdivisions == 0 {
            return Err(Error::InvalidResolution(
                "subdivisions must be positive".into(),
            ));
        }
        let k = subdivisions;
        let d = n + 1;
        let mut index: HashMap<[usize; 4], usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut simplices = Vec::new();
        let mut vertex = |c: [usize; 4], vertices: &mut Vec<Point>| -> usize {
            *index.entry(c).or_insert_with(|| {
                let mut p = ZERO;
                for i in 0..d {
                    p[i] = -1.0 + 2.0 * c[i] as f64 / k as f64;
                }
                vertices.push(normalize(&p));
                vertices.len() - 1
            })
        };
        for axis in 0..d {
            for side in [0, k] {
                let free: Vec<usize> = (0..d).filter(|&i| i != axis).collect();
                let perms = permutations(&free);
                let cells = k.pow(n as u32);
                for cell in 0..cells {
                    let mut corner = [0usize; 4];
                    corner[axis] = side;
                    let mut r = cell;
                    for &f in &free {
                        corner[f] = r % k;
                        r /= k;
                    }
                    for perm in &perms {
                        let mut c = corner;
                        let mut simplex = vec![vertex(c, &mut vertices)];
                        for &f in perm {
                            c[f] += 1;
                            simplex.push(vertex(c, &mut vertices));
                        }
                        simplices.push(simplex);
                    }
                }
            }
        }
        let mut tri = Triangulation {
            n,
            subdivisions,
            vertices,
            simplices,
        };
        for i in 0..tri.simplices.len() {
            if tri.orientation(i) < 0.0 {
                tri.simplices[i].swap(0, 1);
            }
        }
        Ok(tri)
    }

    /// Sign of `det[v₀, v₁ − v₀, …, v_n − v₀]`; positive for the
    /// outward orientation.
    fn orientation(&self, i: usize) -> f64 {
        let s = &self.simplices[i];
        let v0 = self.vertices[s[0]];
        let mut cols = vec![v0];
        cols.extend(s[1..].iter().map(|&j| sub(&self.vertices[j], &v0)));
        det(&cols)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn descriptor(&self) -> TriangulationDescriptor {
        TriangulationDescriptor {
            kind: "cube-boundary-kuhn".into(),
            n: self.n,
            subdivisions: self.subdivisions,
            vertices: self.vertices.len(),
            simplices: self.simplices.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_orientation() {
        for (n, k) in [(2, 3), (3, 2)] {
            let t = Triangulation::cube_sphere(n, k).unwrap();
            let d = n + 1;
            let facets = 2 * d * k.pow(n as u32) * if n == 2 { 2 } else { 6 };
            assert_eq!(t.simplices().len(), facets);
            assert_eq!(
                t.vertices().len(),
                (k + 1).pow(d as u32) - (k - 1).pow(d as u32)
            );
            assert!((0..t.simplices().len()).all(|i| t.orientation(i) > 0.0));
        }
    }

    #[test]
    fn closed_oriented_surface() {
        // every codimension-one face appears twice with opposite orientation
        let t = Triangulation::cube_sphere(2, 4).unwrap();
        let mut edges: HashMap<(usize, usize), i32> = HashMap::new();
        for s in t.simplices() {
            for (a, b) in [(s[0], s[1]), (s[1], s[2]), (s[2], s[0])] {
                *edges.entry((a.min(b), a.max(b))).or_default() += if a < b { 1 } else { -1 };
            }
        }
        assert!(edges.values().all(|&c| c == 0));
        // V − E + F = 2
        let (v, e, f) = (
            t.vertices().len() as i64,
            edges.len() as i64,
            t.simplices().len() as i64,
        );
        assert_eq!(v - e + f, 2);
    }
}

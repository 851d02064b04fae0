use alloc::vec::Vec;

use crate::{Error, Result};

/// Uniform triangulation of `(0,1)²`: an `n × n` grid of squares, each cut along its
/// `(0,0)–(1,1)` diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n: usize,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds the mesh with `n` cells per side.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("mesh needs at least one cell per side"));
        }
        let h = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                // Exact endpoints so boundary detection never depends on rounding.
                let x = if i == n { 1.0 } else { i as f64 * h };
                let y = if j == n { 1.0 } else { j as f64 * h };
                vertices.push([x, y]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let a = j * (n + 1) + i;
                let b = a + 1;
                let c = a + n + 1;
                let d = c + 1;
                triangles.push([a, b, d]);
                triangles.push([a, d, c]);
            }
        }
        Ok(Mesh {
            n,
            vertices,
            triangles,
        })
    }

    /// Cells per side.
    pub fn cells_per_side(&self) -> usize {
        self.n
    }

    /// Vertex coordinates, row by row from the bottom.
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Counter-clockwise vertex triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Integer lattice coordinates `(i, j)` of a vertex.
    pub fn lattice(&self, vertex: usize) -> (usize, usize) {
        (vertex % (self.n + 1), vertex / (self.n + 1))
    }

    /// Signed area of triangle `t`.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    /// Triangle containing `p`, with `p` in the closed unit square.
    pub(crate) fn locate(&self, p: [f64; 2]) -> usize {
        let n = self.n as f64;
        let i = ((p[0] * n) as usize).min(self.n - 1);
        let j = ((p[1] * n) as usize).min(self.n - 1);
        let fx = p[0] * n - i as f64;
        let fy = p[1] * n - j as f64;
        let cell = 2 * (j * self.n + i);
        if fx >= fy {
            cell
        } else {
            cell + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn counts() {
        let m = Mesh::new(1).unwrap();
        assert_eq!((m.triangles().len(), m.vertices().len()), (2, 4));
        let m = Mesh::new(4).unwrap();
        assert_eq!((m.triangles().len(), m.vertices().len()), (32, 25));
    }

    #[test]
    fn zero_cells_rejected() {
        assert!(matches!(Mesh::new(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn areas_positive_and_cover_the_square() {
        let m = Mesh::new(32).unwrap();
        let mut total = 0.0;
        for t in 0..m.triangles().len() {
            let a = m.signed_area(t);
            assert!(a > 0.0);
            total += a;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
}

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{Mesh, TriangleRule};
use crate::linalg::CsrPattern;
use crate::{Error, Result};

/// Tolerance used to decide whether a coordinate lies on `∂Ω`, or inside `Ω̄`.
const GEOMETRY_TOL: f64 = 1e-12;

/// Nodal Lagrange element of degree `p` on the reference triangle.
///
/// Local nodes are indexed by barycentric multi-indices `(i0, i1, i2)` with `i0 + i1 + i2 = p`;
/// node `k` sits at `(i1 / p, i2 / p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceElement {
    degree: usize,
    nodes: Vec<[usize; 3]>,
    rule: TriangleRule,
    /// `values[q * nloc + a]` = `φ_a` at quadrature point `q`.
    values: Vec<f64>,
    /// Reference gradients at quadrature points, same layout as `values`.
    gradients: Vec<[f64; 2]>,
}

impl ReferenceElement {
    fn new(degree: usize) -> Self {
        let mut nodes = Vec::new();
        for i2 in 0..=degree {
            for i1 in 0..=degree - i2 {
                nodes.push([degree - i1 - i2, i1, i2]);
            }
        }
        let rule = TriangleRule::exact_to(2 * degree + 2);
        let mut el = ReferenceElement {
            degree,
            nodes,
            rule,
            values: Vec::new(),
            gradients: Vec::new(),
        };
        let nloc = el.nodes.len();
        let mut values = vec![0.0; el.rule.points.len() * nloc];
        let mut gradients = vec![[0.0; 2]; el.rule.points.len() * nloc];
        for (q, p) in el.rule.points.iter().enumerate() {
            el.eval_into(*p, &mut values[q * nloc..(q + 1) * nloc]);
            el.grad_into(*p, &mut gradients[q * nloc..(q + 1) * nloc]);
        }
        el.values = values;
        el.gradients = gradients;
        el
    }

    /// Polynomial degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Local basis size.
    pub fn local_dofs(&self) -> usize {
        self.nodes.len()
    }

    /// Barycentric multi-indices of the local nodes.
    pub fn nodes(&self) -> &[[usize; 3]] {
        &self.nodes
    }

    /// Quadrature rule.
    pub fn rule(&self) -> &TriangleRule {
        &self.rule
    }

    /// Basis values at quadrature point `q`.
    pub fn values_at(&self, q: usize) -> &[f64] {
        let n = self.nodes.len();
        &self.values[q * n..(q + 1) * n]
    }

    /// Reference gradients at quadrature point `q`.
    pub fn gradients_at(&self, q: usize) -> &[[f64; 2]] {
        let n = self.nodes.len();
        &self.gradients[q * n..(q + 1) * n]
    }

    /// Factor `Π_{l<i} (p λ - l) / (l + 1)` and its derivative in `λ`.
    fn factor(&self, i: usize, lambda: f64) -> (f64, f64) {
        let p = self.degree as f64;
        let mut f = 1.0;
        let mut df = 0.0;
        for l in 0..i {
            let c = 1.0 / (l as f64 + 1.0);
            let term = (p * lambda - l as f64) * c;
            df = df * term + f * p * c;
            f *= term;
        }
        (f, df)
    }

    /// All basis values at reference point `p`.
    pub fn eval_into(&self, p: [f64; 2], out: &mut [f64]) {
        let lam = [1.0 - p[0] - p[1], p[0], p[1]];
        for (o, node) in out.iter_mut().zip(&self.nodes) {
            *o = (0..3).map(|k| self.factor(node[k], lam[k]).0).product();
        }
    }

    /// All reference gradients at reference point `p`.
    pub fn grad_into(&self, p: [f64; 2], out: &mut [[f64; 2]]) {
        let lam = [1.0 - p[0] - p[1], p[0], p[1]];
        for (o, node) in out.iter_mut().zip(&self.nodes) {
            let f: [(f64, f64); 3] = core::array::from_fn(|k| self.factor(node[k], lam[k]));
            let d0 = f[0].1 * f[1].0 * f[2].0;
            let d1 = f[0].0 * f[1].1 * f[2].0;
            let d2 = f[0].0 * f[1].0 * f[2].1;
            *o = [d1 - d0, d2 - d0];
        }
    }
}

/// Affine geometry of one triangle.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ElementGeometry {
    pub origin: [f64; 2],
    /// Columns `v1 - v0`, `v2 - v0`.
    pub jac: [[f64; 2]; 2],
    /// `J⁻ᵀ`, applied to reference gradients.
    pub inv_t: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementGeometry {
    pub fn physical_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }

    pub fn to_physical(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn to_reference(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J⁻¹ = (J⁻ᵀ)ᵀ
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }
}

/// Continuous Lagrange space of degree 1, 2 or 3 on a [`Mesh`].
///
/// Degrees of freedom sit on the refined lattice `{(i/(n p), j/(n p))}` and are numbered row by
/// row, which keeps the half bandwidth near `n p`.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Mesh,
    reference: ReferenceElement,
    dof_coords: Vec<[f64; 2]>,
    on_boundary: Vec<bool>,
    boundary_dofs: Vec<usize>,
    /// `elem_dofs[e * nloc + a]`
    elem_dofs: Vec<usize>,
    pattern: Arc<CsrPattern>,
    /// `positions[e * nloc² + a * nloc + b]` = value slot of `(dof a, dof b)` of element `e`.
    positions: Vec<usize>,
}

impl FeSpace {
    /// Builds the Lagrange space of the given degree.
    pub fn new(mesh: Mesh, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::invalid(alloc::format!(
                "unsupported Lagrange degree {degree}; expected 1, 2 or 3"
            )));
        }
        let reference = ReferenceElement::new(degree);
        let n = mesh.cells_per_side();
        let side = n * degree + 1;
        let ndofs = side * side;
        let h = 1.0 / (n * degree) as f64;
        let coord = |k: usize| if k == side - 1 { 1.0 } else { k as f64 * h };
        let dof_coords: Vec<[f64; 2]> = (0..ndofs).map(|d| [coord(d % side), coord(d / side)]).collect();
        let on_boundary: Vec<bool> = dof_coords
            .iter()
            .map(|p| {
                p[0] < GEOMETRY_TOL
                    || p[1] < GEOMETRY_TOL
                    || p[0] > 1.0 - GEOMETRY_TOL
                    || p[1] > 1.0 - GEOMETRY_TOL
            })
            .collect();
        let boundary_dofs = (0..ndofs).filter(|&d| on_boundary[d]).collect();

        let nloc = reference.local_dofs();
        let mut elem_dofs = Vec::with_capacity(mesh.triangles().len() * nloc);
        for tri in mesh.triangles() {
            let lat: [(usize, usize); 3] = core::array::from_fn(|k| mesh.lattice(tri[k]));
            for node in reference.nodes() {
                let fx: usize = (0..3).map(|k| node[k] * lat[k].0).sum();
                let fy: usize = (0..3).map(|k| node[k] * lat[k].1).sum();
                elem_dofs.push(fy * side + fx);
            }
        }
        let mut pairs = Vec::with_capacity(elem_dofs.len() * nloc);
        for dofs in elem_dofs.chunks(nloc) {
            for &a in dofs {
                for &b in dofs {
                    pairs.push((a, b));
                }
            }
        }
        let pattern = Arc::new(CsrPattern::from_pairs(ndofs, pairs));
        let mut positions = Vec::with_capacity(elem_dofs.len() * nloc);
        for dofs in elem_dofs.chunks(nloc) {
            for &a in dofs {
                for &b in dofs {
                    positions.push(pattern.position(a, b).expect("element pair in pattern"));
                }
            }
        }
        Ok(FeSpace {
            mesh,
            reference,
            dof_coords,
            on_boundary,
            boundary_dofs,
            elem_dofs,
            pattern,
            positions,
        })
    }

    /// Underlying mesh.
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Polynomial degree.
    pub fn degree(&self) -> usize {
        self.reference.degree()
    }

    /// Reference element.
    pub fn reference(&self) -> &ReferenceElement {
        &self.reference
    }

    /// Number of degrees of freedom.
    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    /// Coordinates of every degree of freedom.
    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    /// Degrees of freedom on `∂Ω`, ascending.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    /// Whether `dof` lies on `∂Ω`.
    pub fn is_boundary(&self, dof: usize) -> bool {
        self.on_boundary[dof]
    }

    /// Global indices of element `e`'s local dofs.
    pub fn element_dofs(&self, e: usize) -> &[usize] {
        let nloc = self.reference.local_dofs();
        &self.elem_dofs[e * nloc..(e + 1) * nloc]
    }

    /// Shared matrix sparsity pattern.
    pub fn pattern(&self) -> &Arc<CsrPattern> {
        &self.pattern
    }

    pub(crate) fn element_positions(&self, e: usize) -> &[usize] {
        let n2 = self.reference.local_dofs().pow(2);
        &self.positions[e * n2..(e + 1) * n2]
    }

    pub(crate) fn geometry(&self, e: usize) -> ElementGeometry {
        let [a, b, c] = self.mesh.triangles()[e];
        let v = self.mesh.vertices();
        let (p0, p1, p2) = (v[a], v[b], v[c]);
        let jac = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        // J⁻¹ = adj(J) / det, J⁻ᵀ its transpose.
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        let inv_t = [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]];
        ElementGeometry {
            origin: p0,
            jac,
            inv_t,
            det,
        }
    }

    /// Checks that `field` has one value per dof.
    pub fn check_field(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.n_dofs() {
            return Err(Error::invalid(alloc::format!(
                "field has {} values, space has {} dofs",
                field.len(),
                self.n_dofs()
            )));
        }
        Ok(())
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.dof_coords.iter().map(|&p| f(p)).collect()
    }

    /// Evaluates `field` at an arbitrary point of `Ω̄`.
    pub fn eval_at(&self, field: &[f64], p: [f64; 2]) -> Result<f64> {
        self.check_field(field)?;
        if !(p[0] >= -GEOMETRY_TOL
            && p[1] >= -GEOMETRY_TOL
            && p[0] <= 1.0 + GEOMETRY_TOL
            && p[1] <= 1.0 + GEOMETRY_TOL)
        {
            return Err(Error::invalid(alloc::format!(
                "point ({}, {}) lies outside the unit square",
                p[0],
                p[1]
            )));
        }
        let p = [p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)];
        let e = self.mesh.locate(p);
        let r = self.geometry(e).to_reference(p);
        let mut phi = vec![0.0; self.reference.local_dofs()];
        self.reference.eval_into(r, &mut phi);
        Ok(self
            .element_dofs(e)
            .iter()
            .zip(&phi)
            .map(|(&d, w)| field[d] * w)
            .sum())
    }

    /// Evaluates `field` at several points.
    pub fn eval_at_points(&self, field: &[f64], points: &[[f64; 2]]) -> Result<Vec<f64>> {
        points.iter().map(|&p| self.eval_at(field, p)).collect()
    }

    /// Values of `field` at the given dofs.
    pub fn eval_at_dofs(&self, field: &[f64], dofs: &[usize]) -> Result<Vec<f64>> {
        self.check_field(field)?;
        dofs.iter()
            .map(|&d| {
                field
                    .get(d)
                    .copied()
                    .ok_or_else(|| Error::invalid(alloc::format!("dof {d} out of range")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn space(n: usize, p: usize) -> FeSpace {
        FeSpace::new(Mesh::new(n).unwrap(), p).unwrap()
    }

    #[test]
    fn dof_counts() {
        assert_eq!(space(4, 1).n_dofs(), 25);
        assert_eq!(space(4, 2).n_dofs(), 81);
        assert_eq!(space(4, 3).n_dofs(), 169);
    }

    #[test]
    fn unsupported_degree() {
        assert!(FeSpace::new(Mesh::new(2).unwrap(), 4).is_err());
        assert!(FeSpace::new(Mesh::new(2).unwrap(), 0).is_err());
    }

    #[test]
    fn boundary_dofs_are_exactly_those_on_the_edges() {
        let s = space(4, 3);
        let side = 13;
        assert_eq!(s.boundary_dofs().len(), 4 * (side - 1));
        for (d, p) in s.dof_coords().iter().enumerate() {
            let on = p[0] == 0.0 || p[1] == 0.0 || p[0] == 1.0 || p[1] == 1.0;
            assert_eq!(on, s.is_boundary(d));
        }
    }

    #[test]
    fn nodal_property_and_partition_of_unity() {
        for p in 1..=3 {
            let el = ReferenceElement::new(p);
            let n = el.local_dofs();
            let mut phi = vec![0.0; n];
            for (a, node) in el.nodes().iter().enumerate() {
                let x = [node[1] as f64 / p as f64, node[2] as f64 / p as f64];
                el.eval_into(x, &mut phi);
                for (b, v) in phi.iter().enumerate() {
                    assert_abs_diff_eq!(*v, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-13);
                }
            }
            el.eval_into([0.3, 0.2], &mut phi);
            assert_abs_diff_eq!(phi.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
            let mut g = vec![[0.0; 2]; n];
            el.grad_into([0.3, 0.2], &mut g);
            assert_abs_diff_eq!(g.iter().map(|v| v[0]).sum::<f64>(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(g.iter().map(|v| v[1]).sum::<f64>(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let el = ReferenceElement::new(3);
        let n = el.local_dofs();
        let (mut g, mut f0, mut f1) = (vec![[0.0; 2]; n], vec![0.0; n], vec![0.0; n]);
        let p = [0.21, 0.37];
        let h = 1e-6;
        el.grad_into(p, &mut g);
        for dir in 0..2 {
            let mut pp = p;
            let mut pm = p;
            pp[dir] += h;
            pm[dir] -= h;
            el.eval_into(pp, &mut f0);
            el.eval_into(pm, &mut f1);
            for a in 0..n {
                assert_abs_diff_eq!((f0[a] - f1[a]) / (2.0 * h), g[a][dir], epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn basis_function_evaluation_at_dofs() {
        let s = space(3, 2);
        for i in [0, 5, 17, 30] {
            let mut e = vec![0.0; s.n_dofs()];
            e[i] = 1.0;
            let at = s.eval_at_points(&e, s.dof_coords()).unwrap();
            for (j, v) in at.iter().enumerate() {
                assert_abs_diff_eq!(*v, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn linear_field_reproduced() {
        for p in 1..=3 {
            let s = space(5, p);
            let f = s.interpolate(|x| x[0] + x[1]);
            assert_abs_diff_eq!(s.eval_at(&f, [0.25, 0.5]).unwrap(), 0.75, epsilon = 1e-12);
            assert_abs_diff_eq!(s.eval_at(&f, [0.613, 0.0071]).unwrap(), 0.6201, epsilon = 1e-12);
        }
    }

    #[test]
    fn outside_point_rejected() {
        let s = space(2, 1);
        let f = vec![0.0; s.n_dofs()];
        assert!(s.eval_at(&f, [1.1, 0.5]).is_err());
        assert!(s.eval_at(&f, [0.5, -0.01]).is_err());
        assert!(s.eval_at(&f, [1.0, 1.0]).is_ok());
    }

    #[test]
    fn eval_at_dofs_reads_values() {
        let s = space(2, 2);
        let f = s.interpolate(|x| 3.0 * x[0] - x[1]);
        let v = s.eval_at_dofs(&f, &[0, 4, 24]).unwrap();
        assert_eq!(v, vec![f[0], f[4], f[24]]);
    }
}

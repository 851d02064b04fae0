use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::FeSpace;
use crate::linalg::{dot, CsrMatrix};
use crate::Result;

impl FeSpace {
    fn assemble_local(&self, mut local: impl FnMut(usize, &mut [f64])) -> CsrMatrix {
        let nloc = self.reference().local_dofs();
        let mut m = CsrMatrix::zeros(self.pattern().clone());
        let mut buf = vec![0.0; nloc * nloc];
        for e in 0..self.mesh().triangles().len() {
            buf.iter_mut().for_each(|v| *v = 0.0);
            local(e, &mut buf);
            let values = m.values_mut();
            for (&pos, v) in self.element_positions(e).iter().zip(&buf) {
                values[pos] += v;
            }
        }
        m
    }

    /// Stiffness matrix `A_ij = ∫ ∇φ_j · ∇φ_i`.
    pub fn assemble_stiffness(&self) -> CsrMatrix {
        let re = self.reference();
        let nloc = re.local_dofs();
        let mut grads = vec![[0.0; 2]; nloc];
        self.assemble_local(|e, buf| {
            let geo = self.geometry(e);
            let scale = geo.det.abs();
            for (q, w) in re.rule().weights.iter().enumerate() {
                for (g, r) in grads.iter_mut().zip(re.gradients_at(q)) {
                    *g = geo.physical_gradient(*r);
                }
                let wq = w * scale;
                for a in 0..nloc {
                    for b in 0..nloc {
                        buf[a * nloc + b] += wq * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                    }
                }
            }
        })
    }

    /// Mass matrix `M_ij = ∫ φ_j φ_i`.
    pub fn assemble_mass(&self) -> CsrMatrix {
        let re = self.reference();
        let nloc = re.local_dofs();
        self.assemble_local(|e, buf| {
            let scale = self.geometry(e).det.abs();
            for (q, w) in re.rule().weights.iter().enumerate() {
                let phi = re.values_at(q);
                let wq = w * scale;
                for a in 0..nloc {
                    for b in 0..nloc {
                        buf[a * nloc + b] += wq * phi[a] * phi[b];
                    }
                }
            }
        })
    }

    /// Weighted mass `M_ij = ∫ w φ_j φ_i`, with the weight interpolated from its nodal values.
    pub fn assemble_weighted_mass(&self, weight: &[f64]) -> Result<CsrMatrix> {
        self.check_field(weight)?;
        let re = self.reference();
        let nloc = re.local_dofs();
        Ok(self.assemble_local(|e, buf| {
            let dofs = self.element_dofs(e);
            let scale = self.geometry(e).det.abs();
            for (q, w) in re.rule().weights.iter().enumerate() {
                let phi = re.values_at(q);
                let wx: f64 = dofs.iter().zip(phi).map(|(&d, p)| weight[d] * p).sum();
                let wq = w * scale * wx;
                for a in 0..nloc {
                    for b in 0..nloc {
                        buf[a * nloc + b] += wq * phi[a] * phi[b];
                    }
                }
            }
        }))
    }

    /// Load vector `F_i = ∫ f φ_i`.
    pub fn assemble_load(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let re = self.reference();
        let mut load = vec![0.0; self.n_dofs()];
        for e in 0..self.mesh().triangles().len() {
            let geo = self.geometry(e);
            let scale = geo.det.abs();
            let dofs = self.element_dofs(e);
            for (q, (p, w)) in re.rule().points.iter().zip(&re.rule().weights).enumerate() {
                let fx = f(geo.to_physical(*p)) * w * scale;
                for (&d, phi) in dofs.iter().zip(re.values_at(q)) {
                    load[d] += fx * phi;
                }
            }
        }
        load
    }
}

/// Symmetric elimination of homogeneous Dirichlet conditions.
///
/// Boundary rows and columns become identity rows and columns and the matching right-hand side
/// entries are zeroed; the interior block is left untouched.
pub fn apply_dirichlet(space: &FeSpace, op: &CsrMatrix, rhs: &[f64]) -> (CsrMatrix, Vec<f64>) {
    (eliminate_operator(space, op), eliminate_vector(space, rhs))
}

pub(crate) fn eliminate_operator(space: &FeSpace, op: &CsrMatrix) -> CsrMatrix {
    let mut out = op.clone();
    let pattern = op.pattern().clone();
    let values = out.values_mut();
    let mut k = 0;
    for i in 0..pattern.dim() {
        for (j, _) in op.row(i) {
            if space.is_boundary(i) || space.is_boundary(j) {
                values[k] = if i == j { 1.0 } else { 0.0 };
            }
            k += 1;
        }
    }
    out
}

pub(crate) fn eliminate_vector(space: &FeSpace, rhs: &[f64]) -> Vec<f64> {
    let mut out = rhs.to_vec();
    for &d in space.boundary_dofs() {
        out[d] = 0.0;
    }
    out
}

/// Parameter-independent operators of a space: stiffness, mass, and the `H¹` inner product.
#[derive(Debug, Clone)]
pub struct FeOperators {
    /// `∫ ∇φ_j · ∇φ_i`
    pub stiffness: CsrMatrix,
    /// `∫ φ_j φ_i`
    pub mass: CsrMatrix,
    /// `stiffness + mass`, the matrix of the `H¹` inner product.
    pub inner: CsrMatrix,
    /// `M 1`; `dot(mass_row_sums, u)` is `∫ u`.
    pub mass_row_sums: Vec<f64>,
}

impl FeOperators {
    /// Assembles the operators of `space`.
    pub fn new(space: &FeSpace) -> Self {
        let stiffness = space.assemble_stiffness();
        let mass = space.assemble_mass();
        let inner = stiffness.add_scaled(1.0, &mass).expect("shared pattern");
        let mass_row_sums = mass.mul_vec(&vec![1.0; space.n_dofs()]);
        FeOperators {
            stiffness,
            mass,
            inner,
            mass_row_sums,
        }
    }

    /// `‖a‖_{L²} = sqrt(aᵀ M a)`
    pub fn l2_norm(&self, a: &[f64]) -> f64 {
        self.mass.bilinear(a, a).max(0.0).sqrt()
    }

    /// `‖a − b‖_{L²}`
    pub fn l2_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.l2_norm(&d)
    }

    /// `⟨a, b⟩_X = aᵀ (A + M) b`
    pub fn h1_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.inner.bilinear(a, b)
    }

    /// `∫_Ω u`
    pub fn integral(&self, u: &[f64]) -> f64 {
        dot(&self.mass_row_sums, u)
    }
}

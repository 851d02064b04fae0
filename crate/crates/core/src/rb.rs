//! Reduced-basis spaces, EIM-affine reduced operators and the online Newton solver.
//!
//! Everything the online solver touches lives in [`ReducedBlocks`]: the reduced stiffness and
//! load, one reduced vector per residual-EIM basis function, one reduced matrix per
//! Jacobian-EIM basis function, the traces of the reduced basis at both sets of interpolation
//! points, and copies of the two interpolation matrices. An online solve therefore costs
//! `O(N² M + N³)` per Newton step whatever the finite-element dimension.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::eim::EimBasis;
use crate::fem::FeOperators;
use crate::linalg::{axpy, dot, forward_substitution, norm2, DenseMatrix};
use crate::truth::{EimJacobian, NewtonConfig, TruthProblem};
use crate::{Error, NonlinearTerm, Parameter, Result};

/// Relative norm below which an orthogonalized snapshot is rejected.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// `X`-orthonormal reduced basis `ξ_1..ξ_N` with the parameters of its snapshots.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RbSpace {
    basis: Vec<Vec<f64>>,
    parameters: Vec<Parameter>,
    // `X ξ_n`, recomputed on demand after deserialization.
    #[cfg_attr(feature = "serde", serde(skip))]
    images: Vec<Vec<f64>>,
}

impl RbSpace {
    /// Empty space.
    pub fn new() -> Self {
        Self::default()
    }

    /// Dimension `N`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    /// Whether `N = 0`.
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Orthonormal basis fields.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Snapshot parameters `S_N`, in insertion order.
    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    /// Orthonormalizes `u` against the basis (modified Gram–Schmidt, two passes) and appends it.
    ///
    /// Fails with [`Error::LinearDependence`] and leaves the space unchanged when less than
    /// [`DEPENDENCE_TOL`] of `‖u‖_X` survives the projection.
    pub fn add_snapshot(&mut self, ops: &FeOperators, u: &[f64], mu: Parameter) -> Result<()> {
        if u.len() != ops.inner.dim() {
            return Err(Error::invalid(alloc::format!(
                "snapshot has {} values, space has {} dofs",
                u.len(),
                ops.inner.dim()
            )));
        }
        if self.images.len() != self.basis.len() {
            self.images = self.basis.iter().map(|x| ops.inner.mul_vec(x)).collect();
        }
        let norm_u = ops.h1_inner(u, u).max(0.0).sqrt();
        if !(norm_u > 0.0) || !norm_u.is_finite() {
            return Err(Error::LinearDependence(mu));
        }
        let mut v = u.to_vec();
        for _ in 0..2 {
            for (xi, img) in self.basis.iter().zip(&self.images) {
                let c = dot(img, &v);
                axpy(-c, xi, &mut v);
            }
        }
        let mut img = ops.inner.mul_vec(&v);
        let norm_v = dot(&img, &v).max(0.0).sqrt();
        if !(norm_v >= DEPENDENCE_TOL * norm_u) {
            return Err(Error::LinearDependence(mu));
        }
        v.iter_mut().for_each(|x| *x /= norm_v);
        img.iter_mut().for_each(|x| *x /= norm_v);
        self.basis.push(v);
        self.images.push(img);
        self.parameters.push(mu);
        Ok(())
    }

    /// `Σ c_i ξ_i` over the first `coeffs.len()` basis fields.
    pub fn lift(&self, coeffs: &[f64]) -> Vec<f64> {
        assert!(coeffs.len() <= self.len(), "more coefficients than basis fields");
        let n = self.basis.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for (c, xi) in coeffs.iter().zip(&self.basis) {
            axpy(*c, xi, &mut out);
        }
        out
    }

    /// Gram matrix `⟨ξ_i, ξ_j⟩_X`.
    pub fn gram(&self, ops: &FeOperators) -> DenseMatrix {
        let n = self.len();
        let mut g = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let img = ops.inner.mul_vec(&self.basis[j]);
            for i in 0..n {
                g.set(i, j, dot(&self.basis[i], &img));
            }
        }
        g
    }

    /// First `n` basis fields.
    pub fn truncated(&self, n: usize) -> RbSpace {
        let n = n.min(self.len());
        RbSpace {
            basis: self.basis[..n].to_vec(),
            parameters: self.parameters[..n].to_vec(),
            images: self.images.get(..n).map(<[_]>::to_vec).unwrap_or_default(),
        }
    }
}

/// Reduced operators of the EIM-approximated problem.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReducedBlocks {
    a0: DenseMatrix,
    f0: Vec<f64>,
    averages: Vec<f64>,
    rq: Vec<Vec<f64>>,
    aq: Vec<DenseMatrix>,
    trace_r: Vec<Vec<f64>>,
    trace_j: Vec<Vec<f64>>,
    coords_r: Vec<[f64; 2]>,
    coords_j: Vec<[f64; 2]>,
    b_r: DenseMatrix,
    b_j: DenseMatrix,
}

impl ReducedBlocks {
    /// Empty blocks (`N = M = 0`).
    pub fn new() -> Self {
        ReducedBlocks {
            a0: DenseMatrix::zeros(0, 0),
            b_r: DenseMatrix::zeros(0, 0),
            b_j: DenseMatrix::zeros(0, 0),
            ..Default::default()
        }
    }

    /// Blocks for the given basis and interpolants, assembled from scratch.
    pub fn assemble<T: NonlinearTerm>(
        problem: &TruthProblem<T>,
        rb: &RbSpace,
        eim_r: &EimBasis,
        eim_j: &EimBasis,
    ) -> Result<Self> {
        let mut b = Self::new();
        b.extend(problem, rb, eim_r, eim_j)?;
        Ok(b)
    }

    /// Reduced dimension `N`.
    pub fn n(&self) -> usize {
        self.f0.len()
    }

    /// Terms of the residual interpolant.
    pub fn m_residual(&self) -> usize {
        self.rq.len()
    }

    /// Terms of the Jacobian interpolant.
    pub fn m_jacobian(&self) -> usize {
        self.aq.len()
    }

    /// `∫ ∇ξ_j · ∇ξ_i`
    pub fn a0(&self) -> &DenseMatrix {
        &self.a0
    }

    /// `∫ f ξ_i`
    pub fn f0(&self) -> &[f64] {
        &self.f0
    }

    /// `∫ ξ_i`
    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    /// `rq[m][i] = ∫ q_m ξ_i` for the residual interpolant.
    pub fn rq(&self) -> &[Vec<f64>] {
        &self.rq
    }

    /// `aq[m][i][j] = ∫ q_m ξ_j ξ_i` for the Jacobian interpolant.
    pub fn aq(&self) -> &[DenseMatrix] {
        &self.aq
    }

    /// `trace_r[m][n] = ξ_n(t_m)` at the residual interpolation points.
    pub fn trace_residual(&self) -> &[Vec<f64>] {
        &self.trace_r
    }

    /// `trace_j[m][n] = ξ_n(t_m)` at the Jacobian interpolation points.
    pub fn trace_jacobian(&self) -> &[Vec<f64>] {
        &self.trace_j
    }

    /// Adds the rows, columns and matrices introduced by new basis fields or interpolation terms.
    ///
    /// Entries already present are left untouched, and every new entry is computed by the same
    /// formula whatever the order of growth, so blocks grown step by step equal blocks assembled
    /// at once, bitwise.
    pub fn extend<T: NonlinearTerm>(
        &mut self,
        problem: &TruthProblem<T>,
        rb: &RbSpace,
        eim_r: &EimBasis,
        eim_j: &EimBasis,
    ) -> Result<()> {
        let (n0, mr0, mj0) = (self.n(), self.m_residual(), self.m_jacobian());
        let (n, mr, mj) = (rb.len(), eim_r.len(), eim_j.len());
        if n < n0 || mr < mr0 || mj < mj0 {
            return Err(Error::invalid("reduced blocks can only grow"));
        }
        if (n, mr, mj) == (n0, mr0, mj0) {
            return Ok(());
        }
        let ops = problem.operators();
        let xi = rb.basis();
        let coords = problem.space().dof_coords();

        if n > n0 {
            let a_xi: Vec<Vec<f64>> = xi.iter().map(|x| ops.stiffness.mul_vec(x)).collect();
            let mut a0 = self.a0.grown(n - n0, n - n0);
            for i in 0..n {
                for j in 0..n {
                    if i >= n0 || j >= n0 {
                        a0.set(i, j, dot(&xi[i], &a_xi[j]));
                    }
                }
            }
            self.a0 = a0;
            for x in &xi[n0..] {
                self.f0.push(dot(problem.load(), x));
                self.averages.push(ops.integral(x));
            }
        }

        // Residual interpolant: rq and trace_r.
        let m_xi: Vec<Vec<f64>> = if n > n0 || mr > mr0 {
            xi.iter().map(|x| ops.mass.mul_vec(x)).collect()
        } else {
            Vec::new()
        };
        for (m, q) in eim_r.basis().iter().enumerate() {
            let start = if m < mr0 { n0 } else { 0 };
            if m >= mr0 {
                self.rq.push(Vec::with_capacity(n));
                self.trace_r.push(Vec::with_capacity(n));
            }
            let t = eim_r.points()[m];
            for i in start..n {
                self.rq[m].push(dot(q, &m_xi[i]));
                self.trace_r[m].push(xi[i][t]);
            }
        }

        // Jacobian interpolant: aq and trace_j.
        for (m, q) in eim_j.basis().iter().enumerate() {
            let fresh = m >= mj0;
            if !fresh && n == n0 {
                continue;
            }
            let w = problem.space().assemble_weighted_mass(q)?;
            let w_xi: Vec<Vec<f64>> = xi.iter().map(|x| w.mul_vec(x)).collect();
            let mut mat = if fresh {
                DenseMatrix::zeros(n, n)
            } else {
                self.aq[m].grown(n - n0, n - n0)
            };
            for i in 0..n {
                for j in 0..n {
                    if fresh || i >= n0 || j >= n0 {
                        mat.set(i, j, dot(&xi[i], &w_xi[j]));
                    }
                }
            }
            let t = eim_j.points()[m];
            if fresh {
                self.aq.push(mat);
                self.trace_j.push(xi.iter().map(|x| x[t]).collect());
            } else {
                self.aq[m] = mat;
                self.trace_j[m].extend(xi[n0..].iter().map(|x| x[t]));
            }
        }

        self.coords_r = eim_r.points().iter().map(|&t| coords[t]).collect();
        self.coords_j = eim_j.points().iter().map(|&t| coords[t]).collect();
        self.b_r = eim_r.interpolation_matrix().clone();
        self.b_j = eim_j.interpolation_matrix().clone();
        Ok(())
    }

    /// Leading `(n, m_residual, m_jacobian)` sub-blocks.
    pub fn truncated(&self, n: usize, m_r: usize, m_j: usize) -> ReducedBlocks {
        let n = n.min(self.n());
        let m_r = m_r.min(self.m_residual());
        let m_j = m_j.min(self.m_jacobian());
        ReducedBlocks {
            a0: self.a0.leading(n, n),
            f0: self.f0[..n].to_vec(),
            averages: self.averages[..n].to_vec(),
            rq: self.rq[..m_r].iter().map(|v| v[..n].to_vec()).collect(),
            aq: self.aq[..m_j].iter().map(|a| a.leading(n, n)).collect(),
            trace_r: self.trace_r[..m_r].iter().map(|v| v[..n].to_vec()).collect(),
            trace_j: self.trace_j[..m_j].iter().map(|v| v[..n].to_vec()).collect(),
            coords_r: self.coords_r[..m_r].to_vec(),
            coords_j: self.coords_j[..m_j].to_vec(),
            b_r: self.b_r.leading(m_r, m_r),
            b_j: self.b_j.leading(m_j, m_j),
        }
    }

    /// `s_N = Σ c_i ∫ ξ_i`
    pub fn output(&self, coeffs: &[f64]) -> f64 {
        dot(&self.averages[..coeffs.len()], coeffs)
    }

    fn traces_at(trace: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
        trace.iter().map(|row| dot(row, c)).collect()
    }

    /// Reduced residual `A0 c + Σ β^r_m rq_m − F0`.
    fn residual(&self, term: &impl NonlinearTerm, mu: &Parameter, c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let u_t = Self::traces_at(&self.trace_r, c);
        let w: Vec<f64> = u_t.iter().zip(&self.coords_r).map(|(&u, &x)| term.value(u, x, mu)).collect();
        let beta = forward_substitution(&self.b_r, &w);
        let mut r = self.a0.mul_vec(c);
        for (b, rq) in beta.iter().zip(&self.rq) {
            axpy(*b, rq, &mut r);
        }
        for (ri, fi) in r.iter_mut().zip(&self.f0) {
            *ri -= fi;
        }
        (r, u_t)
    }

    fn jacobian(&self, term: &impl NonlinearTerm, mu: &Parameter, c: &[f64], u_t: &[f64], mode: EimJacobian) -> DenseMatrix {
        let n = self.n();
        let mut jac = self.a0.clone();
        match mode {
            EimJacobian::DerivativeEim => {
                let uj = Self::traces_at(&self.trace_j, c);
                let d: Vec<f64> = uj.iter().zip(&self.coords_j).map(|(&u, &x)| term.derivative(u, x, mu)).collect();
                let beta = forward_substitution(&self.b_j, &d);
                for (b, aq) in beta.iter().zip(&self.aq) {
                    for i in 0..n {
                        for j in 0..n {
                            jac.add(i, j, b * aq.get(i, j));
                        }
                    }
                }
            }
            EimJacobian::Consistent => {
                // A0 + Rqᵀ B⁻¹ diag(g'(T c)) T
                let d: Vec<f64> = u_t.iter().zip(&self.coords_r).map(|(&u, &x)| term.derivative(u, x, mu)).collect();
                for j in 0..n {
                    let col: Vec<f64> = self.trace_r.iter().zip(&d).map(|(t, di)| di * t[j]).collect();
                    let g = forward_substitution(&self.b_r, &col);
                    for (gm, rq) in g.iter().zip(&self.rq) {
                        for i in 0..n {
                            jac.add(i, j, gm * rq[i]);
                        }
                    }
                }
            }
        }
        jac
    }

    /// Reduced Newton solve from zero coefficients.
    pub fn solve(&self, term: &impl NonlinearTerm, mu: &Parameter, cfg: &NewtonConfig, mode: EimJacobian) -> Result<RbSolution> {
        cfg.validate()?;
        if self.n() == 0 || self.m_residual() == 0 {
            return Err(Error::invalid("reduced solve needs N ≥ 1 and M ≥ 1"));
        }
        if mode == EimJacobian::DerivativeEim && self.m_jacobian() == 0 {
            return Err(Error::invalid("reduced solve needs a Jacobian interpolant with M ≥ 1"));
        }
        let mut c = vec![0.0; self.n()];
        let mut history = Vec::new();
        let mut threshold = f64::INFINITY;
        for it in 0..=cfg.max_iter {
            let (r, u_t) = self.residual(term, mu, &c);
            let norm = norm2(&r);
            if it == 0 {
                threshold = cfg.threshold(norm);
            }
            history.push(norm);
            if !norm.is_finite() {
                break;
            }
            if norm <= threshold {
                return Ok(RbSolution {
                    coeffs: c,
                    mu: *mu,
                    newton_iters: it,
                });
            }
            if it == cfg.max_iter {
                break;
            }
            let jac = self.jacobian(term, mu, &c, &u_t, mode);
            let delta = jac.solve(&r)?;
            for (ci, di) in c.iter_mut().zip(&delta) {
                *ci -= di;
            }
        }
        Err(Error::NewtonFailure {
            mu: *mu,
            iterations: history.len().saturating_sub(1),
            history,
        })
    }
}

/// Coefficients of a reduced solution.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RbSolution {
    /// `u_{N,i}`
    pub coeffs: Vec<f64>,
    /// Parameter of the solve.
    pub mu: Parameter,
    /// Newton updates performed.
    pub newton_iters: usize,
}

/// EIMs, reduced basis and reduced operators: everything needed online.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReducedModel {
    /// Interpolant of `g`.
    pub eim_g: EimBasis,
    /// Interpolant of `∂g/∂u`.
    pub eim_dg: EimBasis,
    /// Reduced basis.
    pub rb: RbSpace,
    /// Reduced operators.
    pub blocks: ReducedBlocks,
}

impl ReducedModel {
    /// Assembles the blocks for the given spaces.
    pub fn assemble<T: NonlinearTerm>(problem: &TruthProblem<T>, eim_g: EimBasis, eim_dg: EimBasis, rb: RbSpace) -> Result<Self> {
        let blocks = ReducedBlocks::assemble(problem, &rb, &eim_g, &eim_dg)?;
        Ok(ReducedModel { eim_g, eim_dg, rb, blocks })
    }

    /// Reduced dimension.
    pub fn n(&self) -> usize {
        self.rb.len()
    }

    /// Terms of the `g` interpolant.
    pub fn m(&self) -> usize {
        self.eim_g.len()
    }

    /// The model restricted to the first `n` basis fields and `m` terms of each interpolant.
    pub fn truncated(&self, n: usize, m: usize) -> ReducedModel {
        let eim_g = self.eim_g.truncated(m);
        let eim_dg = self.eim_dg.truncated(m);
        let rb = self.rb.truncated(n);
        let blocks = self.blocks.truncated(n, eim_g.len(), eim_dg.len());
        ReducedModel { eim_g, eim_dg, rb, blocks }
    }

    /// Online solve.
    pub fn solve(&self, term: &impl NonlinearTerm, mu: &Parameter, cfg: &NewtonConfig, mode: EimJacobian) -> Result<RbSolution> {
        self.blocks.solve(term, mu, cfg, mode)
    }

    /// `s_N(μ)`
    pub fn output(&self, sol: &RbSolution) -> f64 {
        self.blocks.output(&sol.coeffs)
    }

    /// `u_N(μ) = Σ u_{N,i} ξ_i`
    pub fn lift(&self, sol: &RbSolution) -> Vec<f64> {
        self.rb.lift(&sol.coeffs)
    }
}

//! Newton solver for the full finite-element problem.
//!
//! The discrete residual is `R(u) = A u + M g(u) − F`, where `g(u)` is the nodal field
//! `x_i ↦ g(u_i, x_i; μ)` and `M` the mass matrix, i.e. the nonlinearity is interpolated in the
//! Lagrange space before integration. The reduced model integrates the nonlinearity in exactly the
//! same way, so truth-versus-reduced errors measure model reduction and nothing else.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::eim::EimBasis;
use crate::fem::{apply_dirichlet, FeOperators, FeSpace};
use crate::linalg::{dot, forward_substitution, norm2, DenseMatrix, SparseSolver};
use crate::nonlinear::nodal_values;
use crate::{Error, NonlinearTerm, Parameter, Result};

/// Stopping rule and iteration cap for Newton's method.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NewtonConfig {
    /// Absolute residual tolerance.
    pub abs_tol: f64,
    /// Tolerance relative to the initial residual.
    pub rel_tol: f64,
    /// Maximum number of Newton updates.
    pub max_iter: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 50,
        }
    }
}

impl NewtonConfig {
    /// Checks `tolerances > 0` and `max_iter ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::invalid("Newton tolerances must be positive and max_iter at least 1"));
        }
        Ok(())
    }

    pub(crate) fn threshold(&self, initial: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * initial)
    }
}

/// Outcome of a converged Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    /// Newton updates performed.
    pub iterations: usize,
    /// Residual norm of the returned iterate.
    pub final_residual_norm: f64,
    /// Residual norm at every iterate, starting with the initial guess.
    pub residual_history: Vec<f64>,
    /// Finite-element solves counted for this call (always 1 on success).
    pub fe_solve_counter_increment: usize,
}

/// How the Jacobian of an EIM-approximated residual is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EimJacobian {
    /// `A + ∫ I_M[∂g/∂u] δu v`, with the derivative interpolated by its own EIM.
    #[default]
    DerivativeEim,
    /// Exact derivative of the interpolated residual: `A + M Q B⁻¹ diag(∂g/∂u(u(t))) P`, where
    /// `P` samples at the interpolation points of the residual EIM.
    Consistent,
}

/// EIM surrogates of `g` and `∂g/∂u`, truncated to the given sizes.
#[derive(Debug, Clone, Copy)]
pub struct EimSurrogate<'a> {
    /// Interpolant of `g`.
    pub residual: &'a EimBasis,
    /// Interpolant of `∂g/∂u`.
    pub jacobian: &'a EimBasis,
    /// Terms used from `residual`.
    pub m_residual: usize,
    /// Terms used from `jacobian`.
    pub m_jacobian: usize,
    /// Jacobian model.
    pub mode: EimJacobian,
}

impl<'a> EimSurrogate<'a> {
    /// Uses every term of both interpolants.
    pub fn full(residual: &'a EimBasis, jacobian: &'a EimBasis, mode: EimJacobian) -> Self {
        EimSurrogate {
            residual,
            jacobian,
            m_residual: residual.len(),
            m_jacobian: jacobian.len(),
            mode,
        }
    }
}

/// The parametrized finite-element problem `−Δu + g(u; μ) = f`, `u = 0` on `∂Ω`.
///
/// Counts every converged finite-element solve; the counter is shared by all threads using the
/// problem.
#[derive(Debug)]
pub struct TruthProblem<T> {
    space: FeSpace,
    ops: FeOperators,
    load: Vec<f64>,
    term: T,
    stiffness_solver: SparseSolver,
    solves: AtomicUsize,
}

impl<T: NonlinearTerm> TruthProblem<T> {
    /// Assembles the parameter-independent operators.
    pub fn new(space: FeSpace, term: T, source: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let ops = FeOperators::new(&space);
        let load = space.assemble_load(source);
        let (a_dir, _) = apply_dirichlet(&space, &ops.stiffness, &load);
        let stiffness_solver = SparseSolver::new(a_dir)?;
        Ok(TruthProblem {
            space,
            ops,
            load,
            term,
            stiffness_solver,
            solves: AtomicUsize::new(0),
        })
    }

    /// Finite-element space.
    pub fn space(&self) -> &FeSpace {
        &self.space
    }

    /// Stiffness, mass and inner-product matrices.
    pub fn operators(&self) -> &FeOperators {
        &self.ops
    }

    /// Load vector `∫ f φ_i`.
    pub fn load(&self) -> &[f64] {
        &self.load
    }

    /// The nonlinearity.
    pub fn term(&self) -> &T {
        &self.term
    }

    /// Converged finite-element solves so far.
    pub fn fe_solve_count(&self) -> usize {
        self.solves.load(Ordering::SeqCst)
    }

    /// Nodal field `g(u(x), x; μ)`.
    pub fn nonlinear_field(&self, u: &[f64], mu: &Parameter) -> Vec<f64> {
        nodal_values(&self.term, u, self.space.dof_coords(), mu, false)
    }

    /// Nodal field `∂g/∂u(u(x), x; μ)`.
    pub fn derivative_field(&self, u: &[f64], mu: &Parameter) -> Vec<f64> {
        nodal_values(&self.term, u, self.space.dof_coords(), mu, true)
    }

    /// Mean of `u` over `Ω` (`|Ω| = 1`).
    pub fn output(&self, u: &[f64]) -> f64 {
        self.ops.integral(u)
    }

    /// Dirichlet-reduced residual `A u + M w − F` for a given nonlinear field `w`.
    fn residual_with(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        let mut r = self.ops.stiffness.mul_vec(u);
        let mw = self.ops.mass.mul_vec(w);
        for ((ri, mi), fi) in r.iter_mut().zip(&mw).zip(&self.load) {
            *ri += mi - fi;
        }
        for &d in self.space.boundary_dofs() {
            r[d] = 0.0;
        }
        r
    }

    /// Residual of the exact problem, with boundary rows removed.
    pub fn residual(&self, u: &[f64], mu: &Parameter) -> Vec<f64> {
        self.residual_with(u, &self.nonlinear_field(u, mu))
    }

    /// Solves from the zero initial guess.
    pub fn solve(&self, mu: &Parameter, cfg: &NewtonConfig) -> Result<(Vec<f64>, SolveStats)> {
        self.solve_from(mu, cfg, &vec![0.0; self.space.n_dofs()])
    }

    /// Solves from a given initial guess (its boundary values are discarded).
    pub fn solve_from(&self, mu: &Parameter, cfg: &NewtonConfig, initial: &[f64]) -> Result<(Vec<f64>, SolveStats)> {
        cfg.validate()?;
        self.space.check_field(initial)?;
        self.newton(mu, cfg, initial, |u| {
            let r = self.residual(u, mu);
            let dg = self.derivative_field(u, mu);
            let jac = self.ops.stiffness.add_scaled(1.0, &self.space.assemble_weighted_mass(&dg)?)?;
            let (jac, rhs) = apply_dirichlet(&self.space, &jac, &r);
            Ok((r, StepSolver::Sparse(SparseSolver::new(jac)?, rhs)))
        })
    }

    /// Solves with `g` (and the Jacobian) replaced by EIM interpolants.
    pub fn solve_with_eim(&self, mu: &Parameter, cfg: &NewtonConfig, eim: &EimSurrogate<'_>) -> Result<(Vec<f64>, SolveStats)> {
        cfg.validate()?;
        if eim.m_residual == 0 || eim.m_residual > eim.residual.len() {
            return Err(Error::invalid("EIM surrogate of g needs between 1 and M terms"));
        }
        if eim.mode == EimJacobian::DerivativeEim && (eim.m_jacobian == 0 || eim.m_jacobian > eim.jacobian.len()) {
            return Err(Error::invalid("EIM surrogate of dg/du needs between 1 and M terms"));
        }
        let coords = self.space.dof_coords();
        let pts_r = &eim.residual.points()[..eim.m_residual];
        let b_r = eim.residual.interpolation_matrix().leading(eim.m_residual, eim.m_residual);
        let interpolate_g = |u: &[f64]| -> Vec<f64> {
            let wt: Vec<f64> = pts_r.iter().map(|&t| self.term.value(u[t], coords[t], mu)).collect();
            let beta = forward_substitution(&b_r, &wt);
            eim.residual.field(&beta)
        };
        let low_rank = match eim.mode {
            EimJacobian::Consistent => Some(self.low_rank_basis(eim.residual, eim.m_residual, &b_r)?),
            EimJacobian::DerivativeEim => None,
        };
        self.newton(mu, cfg, &vec![0.0; self.space.n_dofs()], |u| {
            let r = self.residual_with(u, &interpolate_g(u));
            match &low_rank {
                Some(w) => {
                    let d: Vec<f64> = pts_r
                        .iter()
                        .map(|&t| if self.space.is_boundary(t) { 0.0 } else { self.term.derivative(u[t], coords[t], mu) })
                        .collect();
                    Ok((r, StepSolver::Woodbury { w, points: pts_r, d }))
                }
                None => {
                    let pts_j = &eim.jacobian.points()[..eim.m_jacobian];
                    let b_j = eim.jacobian.interpolation_matrix().leading(eim.m_jacobian, eim.m_jacobian);
                    let wt: Vec<f64> = pts_j.iter().map(|&t| self.term.derivative(u[t], coords[t], mu)).collect();
                    let weight = eim.jacobian.field(&forward_substitution(&b_j, &wt));
                    let jac = self.ops.stiffness.add_scaled(1.0, &self.space.assemble_weighted_mass(&weight)?)?;
                    let (jac, rhs) = apply_dirichlet(&self.space, &jac, &r);
                    Ok((r, StepSolver::Sparse(SparseSolver::new(jac)?, rhs)))
                }
            }
        })
    }

    /// `A_D⁻¹ U` with `U = M Q B⁻¹` (boundary rows dropped): the fixed part of the Woodbury
    /// correction for the consistent EIM Jacobian.
    fn low_rank_basis(&self, eim: &EimBasis, m: usize, b: &DenseMatrix) -> Result<Vec<Vec<f64>>> {
        (0..m)
            .map(|k| {
                let mut unit = vec![0.0; m];
                unit[k] = 1.0;
                let col = forward_substitution(b, &unit);
                let cardinal = eim.field(&col);
                let mut u = self.ops.mass.mul_vec(&cardinal);
                for &d in self.space.boundary_dofs() {
                    u[d] = 0.0;
                }
                self.stiffness_solver.solve(&u)
            })
            .collect()
    }

    fn newton<'s>(
        &self,
        mu: &Parameter,
        cfg: &NewtonConfig,
        initial: &[f64],
        mut step: impl FnMut(&[f64]) -> Result<(Vec<f64>, StepSolver<'s>)>,
    ) -> Result<(Vec<f64>, SolveStats)> {
        let mut u = initial.to_vec();
        for &d in self.space.boundary_dofs() {
            u[d] = 0.0;
        }
        let mut history = Vec::new();
        let mut threshold = f64::INFINITY;
        for it in 0..=cfg.max_iter {
            // A Jacobian that cannot be factored after some updates means the iteration diverged.
            let (r, solver) = match step(&u) {
                Ok(s) => s,
                Err(Error::SolverFailure { .. }) if it > 0 => break,
                Err(e) => return Err(e),
            };
            let norm = norm2(&r);
            if it == 0 {
                threshold = cfg.threshold(norm);
            }
            history.push(norm);
            if !norm.is_finite() {
                break;
            }
            if norm <= threshold {
                self.solves.fetch_add(1, Ordering::SeqCst);
                return Ok((
                    u,
                    SolveStats {
                        iterations: it,
                        final_residual_norm: norm,
                        residual_history: history,
                        fe_solve_counter_increment: 1,
                    },
                ));
            }
            if it == cfg.max_iter {
                break;
            }
            let delta = match solver.solve(&self.stiffness_solver, &r) {
                Ok(d) => d,
                Err(Error::SolverFailure { .. }) if it > 0 => break,
                Err(e) => return Err(e),
            };
            for (ui, di) in u.iter_mut().zip(&delta) {
                *ui -= di;
            }
        }
        Err(Error::NewtonFailure {
            mu: *mu,
            iterations: history.len().saturating_sub(1),
            history,
        })
    }
}

/// Linear solve for one Newton correction `J δ = R` (the update is `u -= δ`).
enum StepSolver<'a> {
    /// Factored Dirichlet-eliminated Jacobian, and the eliminated right-hand side.
    Sparse(SparseSolver, Vec<f64>),
    /// `J = A_D + U D P` with `w = A_D⁻¹ U` precomputed.
    Woodbury {
        w: &'a [Vec<f64>],
        points: &'a [usize],
        d: Vec<f64>,
    },
}

impl StepSolver<'_> {
    fn solve(&self, stiffness: &SparseSolver, r: &[f64]) -> Result<Vec<f64>> {
        match self {
            StepSolver::Sparse(solver, rhs) => {
                debug_assert_eq!(rhs.as_slice(), r);
                solver.solve(rhs)
            }
            StepSolver::Woodbury { w, points, d } => {
                // (A + U D P)⁻¹ r = z − W (I + D P W)⁻¹ D P z, with z = A⁻¹ r.
                let m = points.len();
                let z = stiffness.solve(r)?;
                let mut cap = DenseMatrix::zeros(m, m);
                for i in 0..m {
                    for (k, wk) in w.iter().enumerate() {
                        cap.set(i, k, d[i] * wk[points[i]] + if i == k { 1.0 } else { 0.0 });
                    }
                }
                let rhs: Vec<f64> = (0..m).map(|i| d[i] * z[points[i]]).collect();
                let y = cap.solve(&rhs)?;
                let mut delta = z;
                for (wk, yk) in w.iter().zip(&y) {
                    crate::linalg::axpy(-yk, wk, &mut delta);
                }
                Ok(delta)
            }
        }
    }
}

/// `s = ∫_Ω u` computed from precomputed mass row sums.
pub fn output_average(ops: &FeOperators, u: &[f64]) -> f64 {
    dot(&ops.mass_row_sums, u)
}

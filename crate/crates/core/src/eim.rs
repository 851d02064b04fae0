//! Empirical interpolation of parameter-dependent discrete fields.
//!
//! An [`EimBasis`] holds basis fields `q_m`, interpolation dofs `t_m`, and the lower-triangular
//! interpolation matrix `B[i][m] = q_m(t_i)` with unit diagonal. Sup norms are taken over nodal
//! values, so the interpolation points are dofs and point evaluation is exact.
//!
//! Training is greedy: each step picks the training parameter whose snapshot is worst
//! interpolated by the current basis. Where snapshots come from is up to the
//! [`SnapshotProvider`]: finite-element solutions give the classical method, reduced-basis
//! solutions give the simultaneous one.

use alloc::vec;
use alloc::vec::Vec;

use crate::benchmark::SampleSet;
use crate::exec::Executor;
use crate::linalg::{argmax_abs, forward_substitution, norm_inf, DenseMatrix};
use crate::{Error, Parameter, Result};

/// Sup errors below this are treated as exact interpolation.
pub const MACHINE_FLOOR: f64 = 1e-14;

/// Default relative saturation threshold (relative to the first snapshot's sup norm).
pub const DEFAULT_SATURATION_TOL: f64 = 1e-13;

/// Produces the discrete field `x ↦ w(u(μ), x; μ)` for a parameter.
pub trait SnapshotProvider: Sync {
    /// Snapshot at `mu`; must be deterministic.
    fn snapshot(&self, mu: &Parameter) -> Result<Vec<f64>>;
}

impl<F> SnapshotProvider for F
where
    F: Fn(&Parameter) -> Result<Vec<f64>> + Sync,
{
    fn snapshot(&self, mu: &Parameter) -> Result<Vec<f64>> {
        self(mu)
    }
}

/// Interpolation basis, points and matrix of one EIM.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EimBasis {
    n_dofs: usize,
    basis: Vec<Vec<f64>>,
    points: Vec<usize>,
    matrix: DenseMatrix,
    selected: Vec<Parameter>,
    train_errors: Vec<f64>,
    saturation_tol: f64,
    saturated: bool,
}

/// Result of a greedy step.
#[derive(Debug, Clone, PartialEq)]
pub enum GreedyOutcome {
    /// A basis function was added.
    Enriched {
        /// Selected training parameter.
        mu: Parameter,
        /// Its index in the training set.
        index: usize,
        /// Sup error of the current interpolant at `mu`, before enrichment.
        sup_error: f64,
        /// Training parameters whose snapshot could not be produced.
        skipped: usize,
    },
    /// Every snapshot is already interpolated to the saturation threshold.
    Saturated {
        /// Largest remaining sup error.
        sup_error: f64,
    },
}

impl EimBasis {
    /// Empty basis for fields with `n_dofs` values.
    pub fn new(n_dofs: usize) -> Self {
        EimBasis {
            n_dofs,
            basis: Vec::new(),
            points: Vec::new(),
            matrix: DenseMatrix::zeros(0, 0),
            selected: Vec::new(),
            train_errors: Vec::new(),
            saturation_tol: DEFAULT_SATURATION_TOL,
            saturated: false,
        }
    }

    /// Sets the relative saturation threshold.
    pub fn with_saturation_tol(mut self, tol: f64) -> Self {
        self.saturation_tol = tol;
        self
    }

    /// Number of basis functions `M`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    /// Whether `M = 0`.
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Field length.
    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Basis fields `q_m`.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Interpolation dofs `t_m`.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// `B[i][m] = q_m(t_i)`.
    pub fn interpolation_matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Selected parameters `S_M`, in selection order.
    pub fn selected(&self) -> &[Parameter] {
        &self.selected
    }

    /// Sup error that triggered each enrichment; the first entry is `‖ξ₁‖_∞`.
    pub fn train_errors(&self) -> &[f64] {
        &self.train_errors
    }

    /// Whether a greedy step found nothing left to interpolate.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Absolute threshold below which the greedy reports saturation.
    pub fn saturation_threshold(&self) -> f64 {
        let scale = self.train_errors.first().copied().unwrap_or(0.0);
        MACHINE_FLOOR.max(self.saturation_tol * scale)
    }

    /// First `m` basis functions; later enrichments never touch earlier ones, so this is the
    /// basis as it was after step `m`.
    pub fn truncated(&self, m: usize) -> EimBasis {
        let m = m.min(self.len());
        EimBasis {
            n_dofs: self.n_dofs,
            basis: self.basis[..m].to_vec(),
            points: self.points[..m].to_vec(),
            matrix: self.matrix.leading(m, m),
            selected: self.selected[..m].to_vec(),
            train_errors: self.train_errors[..m].to_vec(),
            saturation_tol: self.saturation_tol,
            saturated: self.saturated && m == self.len(),
        }
    }

    /// Online coefficients: solves `B β = w(t)` by forward substitution.
    pub fn coefficients(&self, w_at_points: &[f64]) -> Result<Vec<f64>> {
        if w_at_points.len() > self.len() {
            return Err(Error::invalid(alloc::format!(
                "{} point values for an EIM with {} terms",
                w_at_points.len(),
                self.len()
            )));
        }
        Ok(forward_substitution(&self.matrix, w_at_points))
    }

    /// `Σ β_m q_m` over the first `β.len()` basis functions.
    pub fn field(&self, beta: &[f64]) -> Vec<f64> {
        assert!(beta.len() <= self.len(), "more coefficients than basis functions");
        let mut out = vec![0.0; self.n_dofs];
        for (b, q) in beta.iter().zip(&self.basis) {
            if *b != 0.0 {
                crate::linalg::axpy(*b, q, &mut out);
            }
        }
        out
    }

    /// Interpolant `I_M[w]` of a full field.
    pub fn interpolant(&self, w: &[f64]) -> Vec<f64> {
        let wt: Vec<f64> = self.points.iter().map(|&t| w[t]).collect();
        self.field(&forward_substitution(&self.matrix, &wt))
    }

    /// `w − I_M[w]`
    pub fn residual(&self, w: &[f64]) -> Vec<f64> {
        let iw = self.interpolant(w);
        w.iter().zip(&iw).map(|(a, b)| a - b).collect()
    }

    /// `‖w − I_M[w]‖_∞` over dofs.
    pub fn sup_error(&self, w: &[f64]) -> f64 {
        if self.is_empty() {
            return norm_inf(w);
        }
        norm_inf(&self.residual(w))
    }

    /// First step: `ξ₁ = w(μ₁)`, `t₁ = argmax |ξ₁|`, `q₁ = ξ₁ / ξ₁(t₁)`.
    pub fn initialize(&mut self, mu: Parameter, snapshot: Vec<f64>) -> Result<()> {
        if !self.is_empty() {
            return Err(Error::invalid("EIM is already initialized"));
        }
        self.check_len(&snapshot)?;
        let sup = norm_inf(&snapshot);
        if !(sup > 0.0) || !sup.is_finite() {
            return Err(Error::DegenerateSnapshot(mu));
        }
        self.push(mu, snapshot, sup)
    }

    /// Adds the residual of `snapshot` as the next basis function.
    pub fn enrich(&mut self, mu: Parameter, snapshot: &[f64]) -> Result<f64> {
        if self.is_empty() {
            self.initialize(mu, snapshot.to_vec())?;
            return Ok(self.train_errors[0]);
        }
        self.check_len(snapshot)?;
        let mut r = self.residual(snapshot);
        if let Some(t) = argmax_abs(&r).filter(|t| self.points.contains(t)) {
            return Err(Error::DegeneratePoint(t));
        }
        // The residual vanishes at the existing points; drop the rounding noise so B stays triangular.
        for &t in &self.points {
            r[t] = 0.0;
        }
        let sup = norm_inf(&r);
        if !sup.is_finite() {
            return Err(Error::invalid(alloc::format!("non-finite snapshot at mu = {mu}")));
        }
        self.push(mu, r, sup)?;
        Ok(sup)
    }

    fn push(&mut self, mu: Parameter, r: Vec<f64>, sup: f64) -> Result<()> {
        let t = argmax_abs(&r).ok_or_else(|| Error::invalid("empty snapshot"))?;
        if self.points.contains(&t) {
            return Err(Error::DegeneratePoint(t));
        }
        let scale = r[t];
        if !(scale.abs() > 0.0) {
            return Err(Error::DegenerateSnapshot(mu));
        }
        let q: Vec<f64> = r.iter().map(|v| v / scale).collect();
        let m = self.len();
        let mut b = self.matrix.grown(1, 1);
        for (i, &ti) in self.points.iter().enumerate() {
            b.set(i, m, q[ti]);
        }
        for (k, qk) in self.basis.iter().enumerate() {
            b.set(m, k, qk[t]);
        }
        b.set(m, m, q[t]);
        self.matrix = b;
        self.basis.push(q);
        self.points.push(t);
        self.selected.push(mu);
        self.train_errors.push(sup);
        Ok(())
    }

    fn check_len(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.n_dofs {
            return Err(Error::invalid(alloc::format!(
                "snapshot has {} values, EIM expects {}",
                w.len(),
                self.n_dofs
            )));
        }
        Ok(())
    }

    /// Evaluates `sup_error` for every snapshot, skipping failures (`None`).
    pub fn sweep_errors(&self, snapshots: &[Option<Vec<f64>>]) -> Vec<Option<f64>> {
        snapshots
            .iter()
            .map(|s| s.as_ref().map(|w| self.sup_error(w)))
            .collect()
    }

    pub(crate) fn mark_saturated(&mut self) {
        self.saturated = true;
    }
}

/// Index and value of the largest error; ties resolve to the smallest index, `NaN` entries lose.
pub fn select_max(errors: &[Option<f64>]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in errors.iter().enumerate() {
        if let Some(e) = *e {
            if e.is_nan() {
                continue;
            }
            match best {
                Some((_, b)) if e <= b => {}
                _ => best = Some((i, e)),
            }
        }
    }
    best
}

/// Training-set indices sorted by decreasing error (stable; failures last).
pub fn rank_by_error(errors: &[Option<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..errors.len()).filter(|&i| errors[i].is_some_and(|e| !e.is_nan())).collect();
    idx.sort_by(|&a, &b| {
        let (ea, eb) = (errors[a].unwrap_or(0.0), errors[b].unwrap_or(0.0));
        eb.partial_cmp(&ea).unwrap_or(core::cmp::Ordering::Equal)
    });
    idx
}

/// Starts an EIM from the first training parameter.
pub fn eim_initialize(provider: &impl SnapshotProvider, xi: &SampleSet, n_dofs: usize) -> Result<EimBasis> {
    let mu = *xi.points().first().ok_or_else(|| Error::invalid("empty training set"))?;
    let mut basis = EimBasis::new(n_dofs);
    basis.initialize(mu, provider.snapshot(&mu)?)?;
    Ok(basis)
}

/// One greedy enrichment over `xi`.
///
/// Parameters whose snapshot fails are skipped for this sweep; if more than half fail the sweep
/// is aborted. Saturation is reported when the largest error is below the threshold, or when the
/// worst residual peaks at an existing interpolation point.
pub fn eim_greedy_step(
    basis: &mut EimBasis,
    provider: &impl SnapshotProvider,
    xi: &SampleSet,
    exec: &impl Executor,
) -> Result<GreedyOutcome> {
    if basis.is_empty() {
        return Err(Error::invalid("greedy step needs an initialized EIM"));
    }
    let pts = xi.points();
    let shared: &EimBasis = basis;
    let errors: Vec<Option<f64>> = exec.map(pts.len(), |i| provider.snapshot(&pts[i]).ok().map(|w| shared.sup_error(&w)));
    let failed = errors.iter().filter(|e| e.is_none()).count();
    if 2 * failed > pts.len() {
        return Err(Error::GreedyAbort {
            failed,
            total: pts.len(),
        });
    }
    let Some((index, sup_error)) = select_max(&errors) else {
        return Err(Error::GreedyAbort {
            failed,
            total: pts.len(),
        });
    };
    if sup_error <= basis.saturation_threshold() {
        basis.mark_saturated();
        return Ok(GreedyOutcome::Saturated { sup_error });
    }
    let mu = pts[index];
    let w = provider.snapshot(&mu)?;
    match basis.enrich(mu, &w) {
        Ok(_) => {}
        // The exact residual vanishes at interpolation points, so a peak there is round-off.
        Err(Error::DegeneratePoint(_)) => {
            basis.mark_saturated();
            return Ok(GreedyOutcome::Saturated { sup_error });
        }
        Err(e) => return Err(e),
    }
    Ok(GreedyOutcome::Enriched {
        mu,
        index,
        sup_error,
        skipped: failed,
    })
}

/// Trains an EIM to at most `m_max` terms (fewer if it saturates).
pub fn eim_train(
    provider: &impl SnapshotProvider,
    xi: &SampleSet,
    n_dofs: usize,
    m_max: usize,
    saturation_tol: f64,
    exec: &impl Executor,
) -> Result<EimBasis> {
    let mut basis = eim_initialize(provider, xi, n_dofs)?.with_saturation_tol(saturation_tol);
    while basis.len() < m_max {
        if let GreedyOutcome::Saturated { .. } = eim_greedy_step(&mut basis, provider, xi, exec)? {
            break;
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{SampleGeneration, Spacing};
    use crate::exec::Sequential;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> SampleSet {
        SampleSet::generate(SampleGeneration::Grid { n1: n, n2: n, spacing: Spacing::Linear }, 0.1, 1.0).unwrap()
    }

    fn xs(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_snapshot_normalizes_to_one() {
        let mut b = EimBasis::new(5);
        b.initialize(Parameter::new(1.0, 1.0), vec![5.0; 5]).unwrap();
        assert_eq!(b.basis()[0], vec![1.0; 5]);
        assert_eq!(b.interpolation_matrix().get(0, 0), 1.0);
        assert_eq!(b.points(), &[0]);
    }

    #[test]
    fn linear_snapshot_peaks_at_right_edge() {
        let x = xs(11);
        let provider = |mu: &Parameter| Ok(x.iter().map(|v| mu.mu1() * v).collect::<Vec<_>>());
        let b = eim_initialize(&provider, &grid(3), 11).unwrap();
        assert_eq!(b.points(), &[10]);
        for (q, v) in b.basis()[0].iter().zip(&x) {
            assert_abs_diff_eq!(*q, *v, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_first_snapshot_is_degenerate() {
        let provider = |_: &Parameter| Ok(vec![0.0; 4]);
        assert!(matches!(eim_initialize(&provider, &grid(2), 4), Err(Error::DegenerateSnapshot(_))));
    }

    #[test]
    fn rank_one_family_saturates_after_one_term() {
        let x = xs(21);
        let provider = |mu: &Parameter| Ok(x.iter().map(|v| mu.mu1() * (3.0 * v).sin()).collect::<Vec<_>>());
        let mut b = eim_initialize(&provider, &grid(10), 21).unwrap();
        match eim_greedy_step(&mut b, &provider, &grid(10), &Sequential).unwrap() {
            GreedyOutcome::Saturated { sup_error } => assert!(sup_error <= 1e-13),
            other => panic!("expected saturation, got {other:?}"),
        }
        assert_eq!(b.len(), 1);
        assert!(b.is_saturated());
    }

    #[test]
    fn online_coefficients_by_forward_substitution() {
        let mut b = EimBasis::new(2);
        b.initialize(Parameter::new(1.0, 1.0), vec![3.5, 1.0]).unwrap();
        let beta = b.coefficients(&[3.5]).unwrap();
        assert_abs_diff_eq!(beta[0], 3.5, epsilon = 1e-15);
        let m = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.4, 1.0]]);
        let beta = forward_substitution(&m, &[1.0, 2.0]);
        assert_abs_diff_eq!(beta[0], 1.0);
        assert_abs_diff_eq!(beta[1], 1.6, epsilon = 1e-15);
        assert!(EimBasis::new(3).coefficients(&[]).unwrap().is_empty());
    }

    #[test]
    fn field_of_unit_and_zero_coefficients() {
        let x = xs(9);
        let provider = |mu: &Parameter| Ok(x.iter().map(|v| mu.mu1() * v + mu.mu2() * v * v).collect::<Vec<_>>());
        let b = eim_train(&provider, &grid(4), 9, 2, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
        assert_eq!(b.field(&[1.0]), b.basis()[0]);
        assert_eq!(b.field(&[0.0, 0.0]), vec![0.0; 9]);
    }

    #[test]
    fn rank_two_family_is_reproduced_exactly() {
        let x = xs(31);
        let w = |mu: &Parameter| x.iter().map(|v| mu.mu1() * v + mu.mu2() * v * v).collect::<Vec<_>>();
        let provider = |mu: &Parameter| Ok(w(mu));
        let xi = grid(10);
        let b = eim_train(&provider, &xi, 31, 10, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
        assert_eq!(b.len(), 2);
        // Brute force over the whole grid.
        for mu in xi.points() {
            let s = w(mu);
            let err = norm_inf(&b.residual(&s));
            assert!(err <= 1e-12, "mu={mu}: {err}");
        }
        let m = b.interpolation_matrix();
        assert_abs_diff_eq!(m.get(0, 1), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(1, 1), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_point_is_rejected() {
        let mut b = EimBasis::new(3);
        b.initialize(Parameter::new(1.0, 1.0), vec![0.0, 1.0, 0.0]).unwrap();
        // Residual of this snapshot peaks at the existing point only through rounding games;
        // force it by pushing a field that matches nowhere but at t₁.
        let err = b.push(Parameter::new(2.0, 2.0), vec![0.0, 1.0, 0.5], 1.0);
        assert_eq!(err, Err(Error::DegeneratePoint(1)));
    }

    #[test]
    fn selection_prefers_smallest_index_and_skips_failures() {
        assert_eq!(select_max(&[Some(1.0), None, Some(2.0), Some(2.0)]), Some((2, 2.0)));
        assert_eq!(select_max(&[None, None]), None);
        assert_eq!(rank_by_error(&[Some(1.0), None, Some(3.0), Some(1.0)]), vec![2, 0, 3]);
    }
}

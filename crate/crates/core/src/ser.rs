//! Offline builds: the standard EIM-then-RB pipeline, the simultaneous strategy, and grouped
//! strategies in between.
//!
//! All strategies run the same loop over EIM steps `m = 1..=M_max`:
//!
//! 1. a greedy sweep over the training set, fed either by cached finite-element solutions or by
//!    the current reduced model, enriches the interpolants of `g` and `∂g/∂u` (each picks its own
//!    maximizer);
//! 2. every `r` steps the reduced basis grows to `round(N_max · m / M_max)` snapshots.
//!
//! Snapshot parameters are taken from the `g` interpolant's selected parameters, in order, then
//! from the latest greedy ranking, skipping parameters already tried. The simultaneous strategy
//! often selects the same parameter twice, so the second source is needed to make progress.
//! A snapshot whose Newton solve diverges is logged as [`StepKind::SnapshotFailed`] and skipped,
//! like a linearly dependent one.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::benchmark::SampleSet;
use crate::eim::{rank_by_error, select_max, EimBasis, DEFAULT_SATURATION_TOL};
use crate::exec::Executor;
use crate::rb::{RbSpace, ReducedBlocks, ReducedModel};
use crate::truth::{EimJacobian, EimSurrogate, NewtonConfig, TruthProblem};
use crate::{Error, NonlinearTerm, Parameter, Result};

/// How often the reduced basis is refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Strategy {
    /// Train both interpolants on finite-element solutions at every training parameter, then
    /// build the reduced basis from cached solutions.
    Standard,
    /// Refresh the reduced basis every `r` EIM steps; sweeps after the first group use the
    /// reduced model. `r = 1` is the simultaneous strategy.
    Frequency(usize),
}

/// Where reduced-basis snapshots come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SnapshotSource {
    /// Finite-element solve with the exact nonlinearity (reuses cached solutions when present).
    TruthExact,
    /// Finite-element solve with the nonlinearity replaced by the current interpolants.
    #[default]
    TruthWithEim,
}

/// Build settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SerConfig {
    /// Update schedule.
    pub strategy: Strategy,
    /// Re-solve every previous snapshot with the current interpolants before each enrichment.
    pub rebuild_wn: bool,
    /// Final reduced dimension.
    pub n_max: usize,
    /// Final number of interpolation terms.
    pub m_max: usize,
    /// Snapshot solver for the frequency strategies.
    pub snapshot_source: SnapshotSource,
    /// Newton settings for every solve.
    pub newton: NewtonConfig,
    /// Jacobian of the reduced solves.
    pub rb_jacobian: EimJacobian,
    /// Jacobian of finite-element solves with interpolated nonlinearity.
    pub snapshot_jacobian: EimJacobian,
    /// Relative saturation threshold of both interpolants.
    pub saturation_tol: f64,
    /// `(N, M)` models to keep when nestedness does not hold (rebuild mode).
    pub checkpoints: Vec<(usize, usize)>,
}

impl SerConfig {
    /// Standard pipeline.
    pub fn standard(n_max: usize, m_max: usize) -> Self {
        SerConfig {
            strategy: Strategy::Standard,
            rebuild_wn: false,
            n_max,
            m_max,
            snapshot_source: SnapshotSource::TruthWithEim,
            newton: NewtonConfig::default(),
            rb_jacobian: EimJacobian::DerivativeEim,
            snapshot_jacobian: EimJacobian::Consistent,
            saturation_tol: DEFAULT_SATURATION_TOL,
            checkpoints: Vec::new(),
        }
    }

    /// RB refresh every `r` EIM steps.
    pub fn frequency(r: usize, n_max: usize, m_max: usize) -> Self {
        SerConfig {
            strategy: Strategy::Frequency(r),
            ..Self::standard(n_max, m_max)
        }
    }

    /// Checks sizes and tolerances.
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 || self.m_max == 0 {
            return Err(Error::invalid("n_max and m_max must be at least 1"));
        }
        if self.strategy == Strategy::Frequency(0) {
            return Err(Error::invalid("update frequency r must be at least 1"));
        }
        if !(self.saturation_tol >= 0.0) {
            return Err(Error::invalid("saturation tolerance must be non-negative"));
        }
        self.newton.validate()
    }

    /// Table label: `r=M`, `r=5`, `r=1`, `r=1-rebuild`, ...
    pub fn label(&self) -> String {
        let base = match self.strategy {
            Strategy::Standard => String::from("r=M"),
            Strategy::Frequency(r) => format!("r={r}"),
        };
        if self.rebuild_wn {
            base + "-rebuild"
        } else {
            base
        }
    }

    /// Steps served by cached finite-element solutions.
    fn bootstrap(&self) -> usize {
        match self.strategy {
            Strategy::Standard => self.m_max,
            Strategy::Frequency(1) => 0,
            Strategy::Frequency(r) => r.min(self.m_max),
        }
    }

    fn is_update_step(&self, m: usize) -> bool {
        match self.strategy {
            Strategy::Standard => m == self.m_max,
            Strategy::Frequency(r) => m % r == 0 || m == self.m_max,
        }
    }

    /// Reduced dimension after the update at EIM step `m`.
    pub fn target_dimension(&self, m: usize) -> usize {
        if m >= self.m_max {
            return self.n_max;
        }
        let t = (2 * self.n_max * m + self.m_max) / (2 * self.m_max);
        t.clamp(1, self.n_max)
    }
}

/// Which interpolant a log entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EimField {
    /// Interpolant of `g`.
    G,
    /// Interpolant of `∂g/∂u`.
    Dg,
}

/// Kind of a build event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StepKind {
    /// Finite-element solves at every training parameter.
    TruthSweep,
    /// First interpolation term.
    EimInitialize,
    /// Greedy enrichment of an interpolant.
    EimEnrich,
    /// Greedy found nothing left to interpolate.
    EimSaturated,
    /// New reduced-basis field.
    RbEnrich,
    /// Snapshot rejected as linearly dependent.
    RbRejected,
    /// Snapshot solve did not converge; the parameter is skipped.
    SnapshotFailed,
    /// Reduced basis discarded before re-solving its snapshots.
    RbRebuild,
}

/// One build event.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    /// EIM step during which the event happened.
    pub m: usize,
    /// What happened.
    pub kind: StepKind,
    /// Interpolant concerned, for EIM events.
    pub field: Option<EimField>,
    /// Selected or solved parameter.
    pub mu: Option<Parameter>,
    /// Greedy sup error (before enrichment).
    pub sup_error: Option<f64>,
    /// Reduced dimension after the event.
    pub rb_dim: usize,
    /// Training parameters skipped by the sweep because the reduced solve failed.
    pub skipped: usize,
}

/// Deterministic account of a build. Wall-clock timings are kept by the caller.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuildReport {
    /// Variant label.
    pub variant: String,
    /// Finite-element solves performed by the build.
    pub fe_solve_count: usize,
    /// Event log.
    pub steps: Vec<StepRecord>,
}

impl BuildReport {
    /// Empty report.
    pub fn new(variant: impl Into<String>) -> Self {
        BuildReport {
            variant: variant.into(),
            fe_solve_count: 0,
            steps: Vec::new(),
        }
    }

    /// Finite-element solves performed by the build.
    pub fn fe_solve_count(&self) -> usize {
        self.fe_solve_count
    }

    /// Events of one kind.
    pub fn count(&self, kind: StepKind, field: Option<EimField>) -> usize {
        self.steps.iter().filter(|s| s.kind == kind && (field.is_none() || s.field == field)).count()
    }
}

/// Result of a build.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutcome {
    /// Final model.
    pub model: ReducedModel,
    /// Event log and solve count.
    pub report: BuildReport,
    /// Models saved during the build at requested `(N, M)`, in rebuild mode.
    pub checkpoints: Vec<((usize, usize), ReducedModel)>,
}

impl BuildOutcome {
    /// The model at `(n, m)`: a saved checkpoint if there is one, a truncation otherwise.
    pub fn model_at(&self, n: usize, m: usize) -> ReducedModel {
        self.checkpoints
            .iter()
            .find(|(k, _)| *k == (n, m))
            .map(|(_, model)| model.clone())
            .unwrap_or_else(|| self.model.truncated(n, m))
    }
}

/// Runs the standard pipeline; `cfg.strategy` must be [`Strategy::Standard`].
pub fn build_standard<T: NonlinearTerm>(
    truth: &TruthProblem<T>,
    xi: &SampleSet,
    cfg: &SerConfig,
    exec: &impl Executor,
) -> Result<BuildOutcome> {
    if cfg.strategy != Strategy::Standard {
        return Err(Error::invalid("build_standard needs the standard strategy"));
    }
    build(truth, xi, cfg, exec)
}

/// Runs a frequency strategy; `cfg.strategy` must be [`Strategy::Frequency`].
pub fn build_ser<T: NonlinearTerm>(
    truth: &TruthProblem<T>,
    xi: &SampleSet,
    cfg: &SerConfig,
    exec: &impl Executor,
) -> Result<BuildOutcome> {
    if cfg.strategy == Strategy::Standard {
        return Err(Error::invalid("build_ser needs a frequency strategy"));
    }
    build(truth, xi, cfg, exec)
}

/// Runs any strategy.
pub fn build<T: NonlinearTerm>(
    truth: &TruthProblem<T>,
    xi: &SampleSet,
    cfg: &SerConfig,
    exec: &impl Executor,
) -> Result<BuildOutcome> {
    cfg.validate()?;
    if xi.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    let mut b = Builder {
        truth,
        xi,
        cfg,
        start: truth.fe_solve_count(),
        report: BuildReport::new(cfg.label()),
        cache: None,
        eim_g: EimBasis::new(truth.space().n_dofs()).with_saturation_tol(cfg.saturation_tol),
        eim_dg: EimBasis::new(truth.space().n_dofs()).with_saturation_tol(cfg.saturation_tol),
        rb: RbSpace::new(),
        blocks: ReducedBlocks::new(),
        ranking: Vec::new(),
        tried: BTreeSet::new(),
        checkpoints: Vec::new(),
    };
    b.run(exec)?;
    b.report.fe_solve_count = truth.fe_solve_count() - b.start;
    Ok(BuildOutcome {
        model: ReducedModel {
            eim_g: b.eim_g,
            eim_dg: b.eim_dg,
            rb: b.rb,
            blocks: b.blocks,
        },
        report: b.report,
        checkpoints: b.checkpoints,
    })
}

struct Builder<'a, T> {
    truth: &'a TruthProblem<T>,
    xi: &'a SampleSet,
    cfg: &'a SerConfig,
    start: usize,
    report: BuildReport,
    cache: Option<Vec<Vec<f64>>>,
    eim_g: EimBasis,
    eim_dg: EimBasis,
    rb: RbSpace,
    blocks: ReducedBlocks,
    ranking: Vec<usize>,
    tried: BTreeSet<usize>,
    checkpoints: Vec<((usize, usize), ReducedModel)>,
}

/// Nonlinear fields `g(u)` and `∂g/∂u(u)` at one parameter.
type Fields = (Vec<f64>, Vec<f64>);

impl<T: NonlinearTerm> Builder<'_, T> {
    fn log(&mut self, m: usize, kind: StepKind, field: Option<EimField>, mu: Option<Parameter>, sup_error: Option<f64>, skipped: usize) {
        self.report.steps.push(StepRecord {
            m,
            kind,
            field,
            mu,
            sup_error,
            rb_dim: self.rb.len(),
            skipped,
        });
    }

    fn run(&mut self, exec: &impl Executor) -> Result<()> {
        let cfg = self.cfg;
        let pts = self.xi.points();
        if cfg.bootstrap() > 0 {
            let truth = self.truth;
            let newton = cfg.newton;
            let solved = exec.map(pts.len(), |i| truth.solve(&pts[i], &newton).map(|(u, _)| u));
            self.cache = Some(solved.into_iter().collect::<Result<Vec<_>>>()?);
            self.log(0, StepKind::TruthSweep, None, None, None, 0);
        }

        let (g0, dg0) = match &self.cache {
            Some(_) => self.cached_fields(0),
            None => {
                let (u, _) = self.truth.solve(&pts[0], &cfg.newton)?;
                self.fields(&u, &pts[0])
            }
        };
        self.eim_g.initialize(pts[0], g0)?;
        self.eim_dg.initialize(pts[0], dg0)?;
        let (e_g, e_dg) = (self.eim_g.train_errors()[0], self.eim_dg.train_errors()[0]);
        self.log(1, StepKind::EimInitialize, Some(EimField::G), Some(pts[0]), Some(e_g), 0);
        self.log(1, StepKind::EimInitialize, Some(EimField::Dg), Some(pts[0]), Some(e_dg), 0);

        for m in 1..=cfg.m_max {
            if m > 1 {
                self.greedy_step(m, exec)?;
            }
            if cfg.is_update_step(m) {
                self.update_rb(m)?;
            }
            if !self.rb.is_empty() {
                self.blocks.extend(self.truth, &self.rb, &self.eim_g, &self.eim_dg)?;
            }
            if cfg.rebuild_wn {
                for &(n, mc) in &cfg.checkpoints {
                    if mc == m && n <= self.rb.len() && !self.rb.is_empty() {
                        let model = ReducedModel {
                            eim_g: self.eim_g.clone(),
                            eim_dg: self.eim_dg.clone(),
                            rb: self.rb.clone(),
                            blocks: self.blocks.clone(),
                        };
                        self.checkpoints.push(((n, m), model.truncated(n, m)));
                    }
                }
            }
        }
        Ok(())
    }

    fn fields(&self, u: &[f64], mu: &Parameter) -> Fields {
        (self.truth.nonlinear_field(u, mu), self.truth.derivative_field(u, mu))
    }

    fn cached_fields(&self, i: usize) -> Fields {
        let u = &self.cache.as_ref().expect("cached solutions")[i];
        self.fields(u, &self.xi.points()[i])
    }

    /// Fields at `Ξ[i]` from the reduced model, `None` if the reduced solve fails.
    fn reduced_fields(&self, i: usize) -> Option<Fields> {
        let mu = &self.xi.points()[i];
        let sol = self.blocks.solve(self.truth.term(), mu, &self.cfg.newton, self.cfg.rb_jacobian).ok()?;
        let u = self.rb.lift(&sol.coeffs);
        Some(self.fields(&u, mu))
    }

    fn provide(&self, i: usize, use_cache: bool) -> Option<Fields> {
        if use_cache {
            Some(self.cached_fields(i))
        } else {
            self.reduced_fields(i)
        }
    }

    fn greedy_step(&mut self, m: usize, exec: &impl Executor) -> Result<()> {
        let use_cache = m <= self.cfg.bootstrap();
        let pts = self.xi.points();
        let this: &Self = self;
        let errors: Vec<Option<(f64, f64)>> = exec.map(pts.len(), |i| {
            this.provide(i, use_cache)
                .map(|(g, dg)| (this.eim_g.sup_error(&g), this.eim_dg.sup_error(&dg)))
        });
        let failed = errors.iter().filter(|e| e.is_none()).count();
        if 2 * failed > pts.len() {
            return Err(Error::GreedyAbort {
                failed,
                total: pts.len(),
            });
        }
        let err_g: Vec<Option<f64>> = errors.iter().map(|e| e.map(|e| e.0)).collect();
        let err_dg: Vec<Option<f64>> = errors.iter().map(|e| e.map(|e| e.1)).collect();
        self.ranking = rank_by_error(&err_g);

        for (field, errs) in [(EimField::G, err_g), (EimField::Dg, err_dg)] {
            let basis = match field {
                EimField::G => &self.eim_g,
                EimField::Dg => &self.eim_dg,
            };
            if basis.is_saturated() {
                continue;
            }
            let Some((i, sup)) = select_max(&errs) else {
                return Err(Error::GreedyAbort {
                    failed,
                    total: pts.len(),
                });
            };
            let mu = pts[i];
            if sup <= basis.saturation_threshold() {
                match field {
                    EimField::G => self.eim_g.mark_saturated(),
                    EimField::Dg => self.eim_dg.mark_saturated(),
                }
                self.log(m, StepKind::EimSaturated, Some(field), None, Some(sup), failed);
                continue;
            }
            let (g, dg) = self.provide(i, use_cache).ok_or_else(|| Error::invalid(format!("reduced solve at mu = {mu} is not reproducible")))?;
            let (basis, w) = match field {
                EimField::G => (&mut self.eim_g, g),
                EimField::Dg => (&mut self.eim_dg, dg),
            };
            match basis.enrich(mu, &w) {
                Ok(_) => self.log(m, StepKind::EimEnrich, Some(field), Some(mu), Some(sup), failed),
                Err(Error::DegeneratePoint(_)) => {
                    basis.mark_saturated();
                    self.log(m, StepKind::EimSaturated, Some(field), None, Some(sup), failed);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn index_of(&self, mu: &Parameter) -> Option<usize> {
        self.xi.points().iter().position(|p| p.same_as(mu))
    }

    fn snapshot(&self, i: usize) -> Result<Vec<f64>> {
        let mu = &self.xi.points()[i];
        let exact = self.cfg.strategy == Strategy::Standard || self.cfg.snapshot_source == SnapshotSource::TruthExact;
        if exact {
            if let Some(cache) = &self.cache {
                return Ok(cache[i].clone());
            }
            return Ok(self.truth.solve(mu, &self.cfg.newton)?.0);
        }
        let eim = EimSurrogate::full(&self.eim_g, &self.eim_dg, self.cfg.snapshot_jacobian);
        Ok(self.truth.solve_with_eim(mu, &self.cfg.newton, &eim)?.0)
    }

    fn add(&mut self, m: usize, i: usize) -> Result<()> {
        let mu = self.xi.points()[i];
        let u = match self.snapshot(i) {
            Ok(u) => u,
            Err(Error::NewtonFailure { .. }) => {
                self.log(m, StepKind::SnapshotFailed, None, Some(mu), None, 0);
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        match self.rb.add_snapshot(self.truth.operators(), &u, mu) {
            Ok(()) => self.log(m, StepKind::RbEnrich, None, Some(mu), None, 0),
            Err(Error::LinearDependence(_)) => self.log(m, StepKind::RbRejected, None, Some(mu), None, 0),
            Err(e) => return Err(e),
        }
        Ok(())
    }

    fn update_rb(&mut self, m: usize) -> Result<()> {
        let target = self.cfg.target_dimension(m);
        if self.rb.len() >= target {
            return Ok(());
        }
        if self.cfg.rebuild_wn && !self.rb.is_empty() {
            let previous: Vec<usize> = self.rb.parameters().iter().filter_map(|mu| self.index_of(mu)).collect();
            self.rb = RbSpace::new();
            self.blocks = ReducedBlocks::new();
            self.log(m, StepKind::RbRebuild, None, None, None, 0);
            for i in previous {
                self.add(m, i)?;
            }
        }
        let candidates: Vec<usize> = self
            .eim_g
            .selected()
            .iter()
            .filter_map(|mu| self.index_of(mu))
            .chain(self.ranking.iter().copied())
            .collect();
        for i in candidates {
            if self.rb.len() >= target {
                break;
            }
            if self.tried.insert(i) {
                self.add(m, i)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{benchmark_nonlinearity, source, ExponentialReaction, SampleGeneration, Spacing};
    use crate::eim::eim_train;
    use crate::exec::Sequential;
    use crate::fem::{FeSpace, Mesh};
    use alloc::vec;

    fn bench() -> TruthProblem<ExponentialReaction> {
        TruthProblem::new(FeSpace::new(Mesh::new(8).unwrap(), 1).unwrap(), benchmark_nonlinearity(), source).unwrap()
    }

    fn train(k: usize) -> SampleSet {
        SampleSet::benchmark(SampleGeneration::Grid { n1: k, n2: k, spacing: Spacing::Log }).unwrap()
    }

    #[test]
    fn schedule_targets() {
        let cfg = SerConfig::frequency(5, 20, 25);
        let targets: Vec<usize> = (1..=25).filter(|m| cfg.is_update_step(*m)).map(|m| cfg.target_dimension(m)).collect();
        assert_eq!(targets, vec![4, 8, 12, 16, 20]);
        let cfg = SerConfig::frequency(1, 5, 5);
        assert_eq!((1..=5).map(|m| cfg.target_dimension(m)).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        assert_eq!(SerConfig::frequency(3, 2, 9).target_dimension(3), 1);
        assert_eq!(SerConfig::standard(4, 5).label(), "r=M");
        assert_eq!(SerConfig { rebuild_wn: true, ..SerConfig::frequency(1, 4, 5) }.label(), "r=1-rebuild");
        assert!(SerConfig::frequency(0, 1, 1).validate().is_err());
        assert!(SerConfig::standard(0, 1).validate().is_err());
    }

    #[test]
    fn simultaneous_build_counts_n_plus_one() {
        let p = bench();
        let out = build_ser(&p, &train(5), &SerConfig::frequency(1, 5, 5), &Sequential).unwrap();
        assert_eq!(out.report.fe_solve_count(), 6);
        assert_eq!(out.model.n(), 5);
        assert_eq!(out.model.m(), 5);
        assert_eq!(out.report.count(StepKind::EimEnrich, Some(EimField::G)), 4);
        assert_eq!(out.report.count(StepKind::RbEnrich, None), 5);
    }

    #[test]
    fn rebuild_counts_triangular_numbers() {
        let p = bench();
        let cfg = SerConfig {
            rebuild_wn: true,
            checkpoints: vec![(2, 2), (5, 5)],
            ..SerConfig::frequency(1, 5, 5)
        };
        let out = build_ser(&p, &train(5), &cfg, &Sequential).unwrap();
        assert_eq!(out.report.fe_solve_count(), 16);
        assert_eq!(out.checkpoints.len(), 2);
        assert_eq!(out.model_at(5, 5), out.model);
    }

    #[test]
    fn standard_counts_training_set() {
        let p = bench();
        let xi = train(6);
        let out = build_standard(&p, &xi, &SerConfig::standard(4, 5), &Sequential).unwrap();
        assert_eq!(out.report.fe_solve_count(), 36);
        assert_eq!(out.model.n(), 4);
        // Same interpolant as the generic greedy fed with cached solutions.
        let sols: Vec<Vec<f64>> = xi.points().iter().map(|mu| p.solve(mu, &NewtonConfig::default()).unwrap().0).collect();
        let provider = |mu: &Parameter| {
            let i = xi.points().iter().position(|q| q.same_as(mu)).unwrap();
            Ok(p.nonlinear_field(&sols[i], mu))
        };
        let direct = eim_train(&provider, &xi, p.space().n_dofs(), 5, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
        assert_eq!(direct, out.model.eim_g);
        assert_eq!(&out.model.rb.parameters()[..], &direct.selected()[..4]);
    }

    #[test]
    fn wrong_strategy_rejected() {
        let p = bench();
        assert!(build_standard(&p, &train(2), &SerConfig::frequency(1, 1, 1), &Sequential).is_err());
        assert!(build_ser(&p, &train(2), &SerConfig::standard(1, 1), &Sequential).is_err());
    }
}

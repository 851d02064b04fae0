use std::f64::consts::PI;

use proptest::prelude::*;
use ser_core::benchmark::{benchmark_nonlinearity, source, SampleGeneration, SampleSet, Spacing};
use ser_core::eim::{eim_train, DEFAULT_SATURATION_TOL};
use ser_core::exec::Sequential;
use ser_core::fem::{FeSpace, Mesh};
use ser_core::truth::{EimJacobian, EimSurrogate, NewtonConfig, TruthProblem};
use ser_core::{Error, NonlinearTerm, Parameter};

fn benchmark(n: usize, p: usize) -> TruthProblem<ser_core::benchmark::ExponentialReaction> {
    TruthProblem::new(FeSpace::new(Mesh::new(n).unwrap(), p).unwrap(), benchmark_nonlinearity(), source).unwrap()
}

/// `g = μ₁ sin(πx) sin(πy)`: independent of `u`, so its nodal field has rank one in `μ`.
struct RankOne;

impl NonlinearTerm for RankOne {
    fn value(&self, _u: f64, x: [f64; 2], mu: &Parameter) -> f64 {
        mu.mu1() * (PI * x[0]).sin() * (PI * x[1]).sin()
    }

    fn derivative(&self, _u: f64, _x: [f64; 2], _mu: &Parameter) -> f64 {
        0.0
    }
}

#[test]
fn benchmark_corner_iteration_counts() {
    // Recorded at n = 32, P2: 3 and 9 iterations.
    let p = benchmark(32, 2);
    let cfg = NewtonConfig::default();
    let (_, lo) = p.solve(&Parameter::new(0.01, 0.01), &cfg).unwrap();
    let (u, hi) = p.solve(&Parameter::new(10.0, 10.0), &cfg).unwrap();
    assert!(lo.iterations <= 4, "{lo:?}");
    assert!(hi.iterations <= 15, "{hi:?}");
    for &d in p.space().boundary_dofs() {
        assert_eq!(u[d], 0.0);
    }
    assert_eq!(p.fe_solve_count(), 2);
}

#[test]
fn linear_regime_output_is_small() {
    let p = benchmark(32, 2);
    let (u, _) = p.solve(&Parameter::new(0.01, 0.01), &NewtonConfig::default()).unwrap();
    assert!(p.output(&u).abs() <= 1e-3, "s = {}", p.output(&u));
}

#[test]
fn rank_one_eim_reproduces_truth() {
    let p = TruthProblem::new(FeSpace::new(Mesh::new(8).unwrap(), 2).unwrap(), RankOne, source).unwrap();
    let n = p.space().n_dofs();
    let xi = SampleSet::benchmark(SampleGeneration::Grid { n1: 4, n2: 4, spacing: Spacing::Log }).unwrap();
    let zero = vec![0.0; n];
    let g_provider = |mu: &Parameter| Ok(p.nonlinear_field(&zero, mu));
    let eim_g = eim_train(&g_provider, &xi, n, 3, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    assert_eq!(eim_g.len(), 1);
    assert!(eim_g.is_saturated());
    // The derivative vanishes; interpolate it with a basis that is exact for zero.
    let ones = |_: &Parameter| Ok(vec![1.0; n]);
    let eim_dg = eim_train(&ones, &xi, n, 1, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    for mu in xi.points() {
        assert!(eim_g.sup_error(&p.nonlinear_field(&zero, mu)) <= 1e-10);
    }
    let cfg = NewtonConfig::default();
    let grid = SampleSet::benchmark(SampleGeneration::Grid { n1: 3, n2: 3, spacing: Spacing::Linear }).unwrap();
    for mu in grid.points() {
        let (u, _) = p.solve(mu, &cfg).unwrap();
        for mode in [EimJacobian::DerivativeEim, EimJacobian::Consistent] {
            let (w, stats) = p.solve_with_eim(mu, &cfg, &EimSurrogate::full(&eim_g, &eim_dg, mode)).unwrap();
            assert_eq!(stats.fe_solve_counter_increment, 1);
            assert!(p.operators().l2_distance(&u, &w) <= 1e-8, "mu = {mu}, {mode:?}");
        }
    }
}

#[test]
fn rough_eim_keeps_boundary_values_and_counts_once() {
    let p = benchmark(8, 2);
    let xi = SampleSet::benchmark(SampleGeneration::Grid { n1: 4, n2: 4, spacing: Spacing::Log }).unwrap();
    let cfg = NewtonConfig::default();
    let sols: Vec<Vec<f64>> = xi.points().iter().map(|mu| p.solve(mu, &cfg).unwrap().0).collect();
    let at = |mu: &Parameter| xi.points().iter().position(|q| q.same_as(mu)).unwrap();
    let g = |mu: &Parameter| Ok(p.nonlinear_field(&sols[at(mu)], mu));
    let dg = |mu: &Parameter| Ok(p.derivative_field(&sols[at(mu)], mu));
    let n = p.space().n_dofs();
    let eim_g = eim_train(&g, &xi, n, 1, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    let eim_dg = eim_train(&dg, &xi, n, 1, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    let mu = Parameter::new(1.0, 1.0);
    let (u, _) = p.solve(&mu, &cfg).unwrap();
    for mode in [EimJacobian::DerivativeEim, EimJacobian::Consistent] {
        let before = p.fe_solve_count();
        let (w, _) = p.solve_with_eim(&mu, &cfg, &EimSurrogate::full(&eim_g, &eim_dg, mode)).unwrap();
        assert_eq!(p.fe_solve_count(), before + 1);
        for &d in p.space().boundary_dofs() {
            assert_eq!(w[d], 0.0);
        }
        assert!(p.operators().l2_distance(&u, &w) > 1e-6);
    }
}

#[test]
fn both_jacobians_reach_the_same_surrogate_solution() {
    let p = benchmark(16, 2);
    let xi = SampleSet::benchmark(SampleGeneration::Grid { n1: 6, n2: 6, spacing: Spacing::Log }).unwrap();
    let cfg = NewtonConfig::default();
    let sols: Vec<Vec<f64>> = xi.points().iter().map(|mu| p.solve(mu, &cfg).unwrap().0).collect();
    let at = |mu: &Parameter| xi.points().iter().position(|q| q.same_as(mu)).unwrap();
    let g = |mu: &Parameter| Ok(p.nonlinear_field(&sols[at(mu)], mu));
    let dg = |mu: &Parameter| Ok(p.derivative_field(&sols[at(mu)], mu));
    let n = p.space().n_dofs();
    let eim_g = eim_train(&g, &xi, n, 8, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    let eim_dg = eim_train(&dg, &xi, n, 8, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    for mu in [Parameter::new(0.3, 7.0), Parameter::new(4.0, 4.0)] {
        let (a, _) = p.solve_with_eim(&mu, &cfg, &EimSurrogate::full(&eim_g, &eim_dg, EimJacobian::DerivativeEim)).unwrap();
        let (b, sb) = p.solve_with_eim(&mu, &cfg, &EimSurrogate::full(&eim_g, &eim_dg, EimJacobian::Consistent)).unwrap();
        let scale = p.operators().l2_norm(&a);
        assert!(p.operators().l2_distance(&a, &b) <= 1e-8 * scale.max(1.0), "mu = {mu}");
        assert!(sb.iterations <= 15);
    }
}

#[test]
fn output_error_is_controlled_by_interpolation_error() {
    let p = benchmark(16, 2);
    let xi = SampleSet::benchmark(SampleGeneration::Grid { n1: 8, n2: 8, spacing: Spacing::Log }).unwrap();
    let cfg = NewtonConfig::default();
    let sols: Vec<Vec<f64>> = xi.points().iter().map(|mu| p.solve(mu, &cfg).unwrap().0).collect();
    let at = |mu: &Parameter| xi.points().iter().position(|q| q.same_as(mu)).unwrap();
    let g = |mu: &Parameter| Ok(p.nonlinear_field(&sols[at(mu)], mu));
    let dg = |mu: &Parameter| Ok(p.derivative_field(&sols[at(mu)], mu));
    let n = p.space().n_dofs();
    let eim_g = eim_train(&g, &xi, n, 16, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    let eim_dg = eim_train(&dg, &xi, n, 16, DEFAULT_SATURATION_TOL, &Sequential).unwrap();
    let mut fitted: f64 = 0.0;
    for m in [9, 12, 15] {
        let eps = eim_g.train_errors()[m];
        let surrogate = EimSurrogate {
            residual: &eim_g,
            jacobian: &eim_dg,
            m_residual: m,
            m_jacobian: m,
            mode: EimJacobian::Consistent,
        };
        for (mu, u) in xi.points().iter().zip(&sols) {
            let (w, _) = p.solve_with_eim(mu, &cfg, &surrogate).unwrap();
            fitted = fitted.max((p.output(&w) - p.output(u)).abs() / eps);
        }
    }
    // Fitted C is about 3e-3 on this mesh.
    assert!(fitted <= 10.0, "C = {fitted}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn counter_matches_successful_solves(schedule in prop::collection::vec((0.01f64..10.0, 0.01f64..10.0, 1usize..4), 1..6)) {
        let p = benchmark(6, 1);
        let mut expected = 0;
        for (mu1, mu2, max_iter) in schedule {
            let cfg = NewtonConfig { max_iter, ..NewtonConfig::default() };
            match p.solve(&Parameter::new(mu1, mu2), &cfg) {
                Ok((_, stats)) => {
                    prop_assert_eq!(stats.fe_solve_counter_increment, 1);
                    expected += 1;
                }
                Err(Error::NewtonFailure { history, .. }) => prop_assert_eq!(history.len(), max_iter + 1),
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
            prop_assert_eq!(p.fe_solve_count(), expected);
        }
    }
}

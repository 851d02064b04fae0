use proptest::prelude::*;
use ser_core::benchmark::{benchmark_nonlinearity, source, ExponentialReaction, SampleGeneration, SampleSet, Spacing};
use ser_core::exec::Sequential;
use ser_core::fem::{FeSpace, Mesh};
use ser_core::ser::{build, build_ser, build_standard, BuildOutcome, EimField, SerConfig, StepKind, Strategy};
use ser_core::truth::TruthProblem;

fn bench() -> TruthProblem<ExponentialReaction> {
    TruthProblem::new(FeSpace::new(Mesh::new(8).unwrap(), 1).unwrap(), benchmark_nonlinearity(), source).unwrap()
}

fn train(k: usize) -> SampleSet {
    SampleSet::benchmark(SampleGeneration::Grid { n1: k, n2: k, spacing: Spacing::Log }).unwrap()
}

/// Solve count predicted from the schedule alone, assuming no snapshot is rejected.
fn predicted_solves(cfg: &SerConfig, n_train: usize) -> usize {
    let r = match cfg.strategy {
        Strategy::Standard => return n_train,
        Strategy::Frequency(r) => r,
    };
    let mut total = if r > 1 { n_train } else { 1 };
    let mut dim = 0;
    for m in 1..=cfg.m_max {
        if m % r != 0 && m != cfg.m_max {
            continue;
        }
        let target = cfg.target_dimension(m);
        if target > dim {
            total += if cfg.rebuild_wn { target } else { target - dim };
            dim = target;
        }
    }
    total
}

fn run(cfg: &SerConfig, k: usize) -> BuildOutcome {
    build(&bench(), &train(k), cfg, &Sequential).unwrap()
}

#[test]
fn simultaneous_strategy_alternates() {
    let out = run(&SerConfig::frequency(1, 5, 5), 5);
    let kinds: Vec<(usize, StepKind, Option<EimField>)> = out.report.steps.iter().map(|s| (s.m, s.kind, s.field)).collect();
    let mut expected = vec![
        (1, StepKind::EimInitialize, Some(EimField::G)),
        (1, StepKind::EimInitialize, Some(EimField::Dg)),
        (1, StepKind::RbEnrich, None),
    ];
    for m in 2..=5 {
        expected.push((m, StepKind::EimEnrich, Some(EimField::G)));
        expected.push((m, StepKind::EimEnrich, Some(EimField::Dg)));
        expected.push((m, StepKind::RbEnrich, None));
    }
    assert_eq!(kinds, expected);
    for s in &out.report.steps {
        if s.kind == StepKind::RbEnrich {
            assert_eq!(s.rb_dim, s.m);
        }
    }
}

#[test]
fn first_snapshot_is_first_interpolation_parameter() {
    let out = run(&SerConfig::frequency(1, 3, 3), 5);
    assert!(out.model.rb.parameters()[0].same_as(&out.model.eim_g.selected()[0]));
    let rb = out.model.rb.parameters();
    for (i, a) in rb.iter().enumerate() {
        for b in &rb[i + 1..] {
            assert!(!a.same_as(b));
        }
    }
}

#[test]
fn simultaneous_builds_are_nested() {
    let small = run(&SerConfig::frequency(1, 3, 3), 5);
    let large = run(&SerConfig::frequency(1, 5, 5), 5);
    assert_eq!(large.model.truncated(3, 3), small.model);
}

#[test]
fn large_update_frequency_reproduces_standard_interpolants() {
    let p = bench();
    let xi = train(5);
    let standard = build_standard(&p, &xi, &SerConfig::standard(3, 4), &Sequential).unwrap();
    for r in [4, 6] {
        let ser = build_ser(&p, &xi, &SerConfig::frequency(r, 3, 4), &Sequential).unwrap();
        assert_eq!(ser.model.eim_g, standard.model.eim_g);
        assert_eq!(ser.model.eim_dg, standard.model.eim_dg);
        assert_eq!(ser.report.fe_solve_count(), xi.len() + 3);
    }
    assert_eq!(standard.report.fe_solve_count(), xi.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solve_accounting_follows_schedule(
        r in prop::sample::select(vec![1usize, 2, 5]),
        n_max in prop::sample::select(vec![3usize, 5]),
        extra_m in 0usize..3,
        rebuild in any::<bool>(),
    ) {
        let cfg = SerConfig { rebuild_wn: rebuild, ..SerConfig::frequency(r, n_max, n_max + extra_m) };
        let out = run(&cfg, 4);
        prop_assert_eq!(out.report.count(StepKind::RbRejected, None), 0);
        prop_assert_eq!(out.report.fe_solve_count(), predicted_solves(&cfg, 16));
        prop_assert_eq!(out.model.n(), n_max);
        prop_assert_eq!(out.model.m(), n_max + extra_m);
        if r == 1 && !rebuild {
            prop_assert_eq!(out.report.fe_solve_count(), n_max + 1);
        }
        if r == 1 && rebuild && extra_m == 0 {
            prop_assert_eq!(out.report.fe_solve_count(), 1 + n_max * (n_max + 1) / 2);
        }
    }
}

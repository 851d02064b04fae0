//! Error studies: reduced solutions against finite-element references over a test set.

use alloc::string::String;
use alloc::vec::Vec;

use crate::benchmark::SampleSet;
use crate::exec::Executor;
use crate::rb::ReducedModel;
use crate::truth::{EimJacobian, NewtonConfig, TruthProblem};
use crate::{Error, NonlinearTerm, Parameter, Result};

/// Maximum errors of one `(N, M)` model over a test set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StudyRow {
    /// Reduced dimension.
    pub n: usize,
    /// Interpolation terms.
    pub m: usize,
    /// `max ‖u − u_N‖_{L²}`
    pub max_err_u: f64,
    /// `max |s − s_N|`
    pub max_err_s: f64,
    /// Variant label.
    pub variant: String,
    /// Number of test parameters whose reference or reduced solve failed (excluded from the
    /// maxima).
    pub failures: usize,
    /// The failed test parameters themselves. Tables keep only the count.
    pub failed: Vec<Parameter>,
}

impl StudyRow {
    /// Whether every test parameter contributed.
    pub fn is_complete(&self) -> bool {
        self.failures == 0
    }
}

/// Finite-element solutions and outputs at the test parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolutions {
    /// Test parameters.
    pub parameters: Vec<Parameter>,
    /// Solutions in parameter order, `None` where Newton failed.
    pub solutions: Vec<Option<Vec<f64>>>,
    /// Outputs `s(μ)`.
    pub outputs: Vec<Option<f64>>,
}

impl ReferenceSolutions {
    /// Solves at every test parameter. These solves go through the problem's counter, so
    /// callers that report build costs should take counts before calling this. Newton failures
    /// are kept as `None`; any other error aborts.
    pub fn compute<T: NonlinearTerm>(
        truth: &TruthProblem<T>,
        test: &SampleSet,
        cfg: &NewtonConfig,
        exec: &impl Executor,
    ) -> Result<Self> {
        cfg.validate()?;
        let pts = test.points();
        let solutions = exec
            .map(pts.len(), |i| match truth.solve(&pts[i], cfg) {
                Ok((u, _)) => Ok(Some(u)),
                Err(Error::NewtonFailure { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let outputs = solutions.iter().map(|u| u.as_ref().map(|u| truth.output(u))).collect();
        Ok(ReferenceSolutions {
            parameters: pts.to_vec(),
            solutions,
            outputs,
        })
    }

    /// Test parameters without a reference solution.
    pub fn failed(&self) -> Vec<Parameter> {
        self.parameters.iter().zip(&self.solutions).filter(|(_, u)| u.is_none()).map(|(mu, _)| *mu).collect()
    }
}

/// Errors of `model` against the references.
pub fn study_row<T: NonlinearTerm>(
    truth: &TruthProblem<T>,
    model: &ReducedModel,
    refs: &ReferenceSolutions,
    cfg: &NewtonConfig,
    mode: EimJacobian,
    variant: &str,
    exec: &impl Executor,
) -> StudyRow {
    let errs: Vec<Option<(f64, f64)>> = exec.map(refs.parameters.len(), |i| {
        let mu = &refs.parameters[i];
        let (reference, s) = (refs.solutions[i].as_ref()?, refs.outputs[i]?);
        let sol = model.solve(truth.term(), mu, cfg, mode).ok()?;
        let u = model.lift(&sol);
        let eu = truth.operators().l2_distance(reference, &u);
        let es = (s - model.output(&sol)).abs();
        Some((eu, es))
    });
    let mut row = StudyRow {
        n: model.n(),
        m: model.m(),
        max_err_u: 0.0,
        max_err_s: 0.0,
        variant: variant.into(),
        failures: 0,
        failed: Vec::new(),
    };
    for (e, mu) in errs.into_iter().zip(&refs.parameters) {
        match e {
            Some((eu, es)) => {
                row.max_err_u = row.max_err_u.max(eu);
                row.max_err_s = row.max_err_s.max(es);
            }
            None => {
                row.failures += 1;
                row.failed.push(*mu);
            }
        }
    }
    row
}

/// One row per checkpoint; `model_at(n, m)` provides the model for each.
#[allow(clippy::too_many_arguments)]
pub fn run_error_study<T: NonlinearTerm>(
    truth: &TruthProblem<T>,
    model_at: impl Fn(usize, usize) -> ReducedModel,
    refs: &ReferenceSolutions,
    checkpoints: &[(usize, usize)],
    cfg: &NewtonConfig,
    mode: EimJacobian,
    variant: &str,
    exec: &impl Executor,
) -> Vec<StudyRow> {
    checkpoints
        .iter()
        .map(|&(n, m)| {
            let mut row = study_row(truth, &model_at(n, m), refs, cfg, mode, variant, exec);
            row.n = n;
            row.m = m;
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{benchmark_nonlinearity, source, SampleGeneration, Spacing};
    use crate::exec::Sequential;
    use crate::fem::{FeSpace, Mesh};
    use crate::ser::{build_standard, SerConfig};

    #[test]
    fn model_reproduces_its_own_snapshots() {
        // P1 on a 4×4 mesh has 9 interior dofs, so 9 interpolation terms are exact.
        let p = TruthProblem::new(FeSpace::new(Mesh::new(4).unwrap(), 1).unwrap(), benchmark_nonlinearity(), source).unwrap();
        let xi = SampleSet::benchmark(SampleGeneration::Grid { n1: 6, n2: 6, spacing: Spacing::Log }).unwrap();
        let out = build_standard(&p, &xi, &SerConfig::standard(4, 30), &Sequential).unwrap();
        assert!(out.model.eim_g.is_saturated());
        let refs_set = SampleSet::from_points(out.model.rb.parameters().to_vec()).unwrap();
        let refs = ReferenceSolutions::compute(&p, &refs_set, &NewtonConfig::default(), &Sequential).unwrap();
        let rows = run_error_study(
            &p,
            |n, m| out.model_at(n, m),
            &refs,
            &[(4, out.model.m())],
            &NewtonConfig::default(),
            EimJacobian::DerivativeEim,
            "r=M",
            &Sequential,
        );
        assert!(rows[0].is_complete());
        assert!(rows[0].max_err_u <= 1e-8, "{:?}", rows[0]);
    }
}

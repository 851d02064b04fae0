//! The work behind each subcommand, callable without the CLI.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ser_core::benchmark::{benchmark_nonlinearity, ExponentialReaction};
use ser_core::exec::Executor;
use ser_core::rb::RbSolution;
use ser_core::ser::build;
use ser_core::study::{run_error_study, ReferenceSolutions, StudyRow};
use ser_core::truth::TruthProblem;
use ser_core::Parameter;

use crate::archive::{write_report, ModelArchive};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::table::emit_table;

/// A trained model and how long training took.
#[derive(Debug, Clone)]
pub struct BuildRun {
    /// Model, configuration and build report.
    pub archive: ModelArchive,
    /// Wall-clock build time.
    pub elapsed: Duration,
}

/// File-name form of a variant label: `r=M` becomes `standard`, `r=1-rebuild` `r1-rebuild`.
pub fn slug(label: &str) -> String {
    if let Some(rest) = label.strip_prefix("r=M") {
        return format!("standard{rest}");
    }
    label.replace('=', "")
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Trains the configured variant on `truth`.
pub fn build_model(cfg: &Config, truth: &TruthProblem<ExponentialReaction>, exec: &impl Executor) -> Result<BuildRun> {
    let xi = cfg.training_set()?;
    let start = Instant::now();
    let outcome = build(truth, &xi, &cfg.ser_config(), exec)?;
    Ok(BuildRun {
        archive: ModelArchive::new(cfg, outcome),
        elapsed: start.elapsed(),
    })
}

/// Reference solutions on the configured test set.
pub fn reference_solutions(
    cfg: &Config,
    truth: &TruthProblem<ExponentialReaction>,
    exec: &impl Executor,
) -> Result<ReferenceSolutions> {
    Ok(ReferenceSolutions::compute(truth, &cfg.test_set()?, &cfg.newton, exec)?)
}

/// Error rows of `archive` at the study checkpoints of `cfg`.
///
/// `cfg` must describe the same model as the archive (equal fingerprints). In rebuild mode every
/// checkpoint except the final one has to have been saved during the build.
pub fn study_model(
    cfg: &Config,
    archive: &ModelArchive,
    truth: &TruthProblem<ExponentialReaction>,
    refs: &ReferenceSolutions,
    exec: &impl Executor,
) -> Result<Vec<StudyRow>> {
    if cfg.fingerprint() != archive.fingerprint {
        return Err(CliError::Config("configuration does not match the model archive".into()));
    }
    let checkpoints = cfg.study_checkpoints();
    let mut models = Vec::with_capacity(checkpoints.len());
    for &(n, m) in &checkpoints {
        let saved = archive.checkpoints.iter().any(|(k, _)| *k == (n, m));
        let is_final = (n, m) == (archive.model.n(), archive.model.m());
        if cfg.rebuild_wn && !saved && !is_final {
            return Err(CliError::Config(format!("checkpoint ({n}, {m}) was not saved during the rebuild-mode build")));
        }
        let model = archive
            .model_at(n, m)
            .ok_or_else(|| CliError::Config(format!("checkpoint ({n}, {m}) exceeds the model size")))?;
        models.push(((n, m), model));
    }
    let model_at = |n: usize, m: usize| {
        models
            .iter()
            .find(|(k, _)| *k == (n, m))
            .map(|(_, model)| model.clone())
            .expect("checkpoint model")
    };
    Ok(run_error_study(
        truth,
        model_at,
        refs,
        &checkpoints,
        &cfg.newton,
        cfg.rb_jacobian,
        &archive.report.variant,
        exec,
    ))
}

/// One online evaluation.
#[derive(Debug, Clone)]
pub struct OnlineSolve {
    /// Reduced solution.
    pub solution: RbSolution,
    /// Output `s_N(μ)`.
    pub output: f64,
    /// Wall-clock time of the reduced solve.
    pub elapsed: Duration,
}

/// Solves the archived model at `mu` with the archived Newton settings.
pub fn solve_online(archive: &ModelArchive, mu: Parameter) -> Result<OnlineSolve> {
    let cfg = archive.config()?;
    let start = Instant::now();
    let solution = archive.model.solve(&benchmark_nonlinearity(), &mu, &cfg.newton, cfg.rb_jacobian)?;
    let elapsed = start.elapsed();
    Ok(OnlineSolve {
        output: archive.model.output(&solution),
        solution,
        elapsed,
    })
}

/// Outcome of one compared variant.
#[derive(Debug, Clone)]
pub struct VariantResult {
    /// Variant label.
    pub label: String,
    /// Error rows.
    pub rows: Vec<StudyRow>,
    /// Finite-element solves of the build.
    pub fe_solve_count: usize,
    /// Wall-clock build time (not written to any file).
    pub build_time: Duration,
    /// Error table path.
    pub table: PathBuf,
    /// Build report path.
    pub report: PathBuf,
}

/// Everything `compare` produced.
#[derive(Debug, Clone)]
pub struct Comparison {
    /// One entry per variant, in the order standard, `r=5`, `r=1-rebuild`, `r=1`.
    pub variants: Vec<VariantResult>,
    /// Reference solves on the test set (not part of any build count).
    pub reference_solves: usize,
    /// Summary file path.
    pub summary: PathBuf,
}

/// `variant,fe_solve_count` lines, then the reference solves.
pub fn render_summary(variants: &[VariantResult], reference_solves: usize) -> String {
    let mut s = String::from("variant,fe_solve_count\n");
    for v in variants {
        s.push_str(&format!("{},{}\n", v.label, v.fe_solve_count));
    }
    s.push_str(&format!("reference,{reference_solves}\n"));
    s
}

/// Builds and studies the four variants, writing `table-<slug>.csv`, `report-<slug>.json` and
/// `solve_counts.csv` into the output directory. Every file is a deterministic function of the
/// configuration.
pub fn compare(cfg: &Config, exec: &impl Executor) -> Result<Comparison> {
    ensure_dir(&cfg.output_dir)?;
    let truth = cfg.truth_problem()?;
    let before = truth.fe_solve_count();
    let refs = reference_solutions(cfg, &truth, exec)?;
    let reference_solves = truth.fe_solve_count() - before;
    let mut variants = Vec::new();
    for vcfg in cfg.compare_variants() {
        let run = build_model(&vcfg, &truth, exec)?;
        let rows = study_model(&vcfg, &run.archive, &truth, &refs, exec)?;
        let name = slug(&run.archive.report.variant);
        let table = cfg.output_dir.join(format!("table-{name}.csv"));
        let report = cfg.output_dir.join(format!("report-{name}.json"));
        emit_table(&rows, &table)?;
        write_report(&run.archive.report, &report)?;
        variants.push(VariantResult {
            label: run.archive.report.variant.clone(),
            rows,
            fe_solve_count: run.archive.report.fe_solve_count(),
            build_time: run.elapsed,
            table,
            report,
        });
    }
    let summary = cfg.output_dir.join("solve_counts.csv");
    std::fs::write(&summary, render_summary(&variants, reference_solves)).map_err(|e| CliError::io(&summary, e))?;
    Ok(Comparison {
        variants,
        reference_solves,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("r=M"), "standard");
        assert_eq!(slug("r=M-rebuild"), "standard-rebuild");
        assert_eq!(slug("r=1-rebuild"), "r1-rebuild");
        assert_eq!(slug("r=5"), "r5");
    }
}

//! Flat `key = value` run configuration.
//!
//! ```text
//! # benchmark defaults
//! mesh.n = 32
//! fem.degree = 2
//! ser.r = standard
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use ser_core::benchmark::{benchmark_nonlinearity, source, ExponentialReaction, SampleGeneration, SampleSet, Spacing};
use ser_core::eim::DEFAULT_SATURATION_TOL;
use ser_core::fem::{FeSpace, Mesh};
use ser_core::ser::{SerConfig, SnapshotSource, Strategy};
use ser_core::truth::{EimJacobian, NewtonConfig, TruthProblem};

use crate::error::{CliError, Result};

/// Everything a build, study or comparison needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Cells per side of the unit square.
    pub mesh_n: usize,
    /// Lagrange degree.
    pub degree: usize,
    /// Training grid points along `μ₁`.
    pub train_n1: usize,
    /// Training grid points along `μ₂`.
    pub train_n2: usize,
    /// Training grid spacing.
    pub train_spacing: Spacing,
    /// Number of random test parameters.
    pub test_count: usize,
    /// Seed of the test set.
    pub test_seed: u64,
    /// Update schedule.
    pub strategy: Strategy,
    /// Re-solve snapshots after each EIM update.
    pub rebuild_wn: bool,
    /// Final reduced dimension.
    pub n_max: usize,
    /// Final number of interpolation terms.
    pub m_max: usize,
    /// Relative EIM saturation threshold.
    pub saturation_tol: f64,
    /// Newton settings of every solve.
    pub newton: NewtonConfig,
    /// Snapshot solver of the frequency strategies.
    pub snapshot_source: SnapshotSource,
    /// Jacobian of the reduced solves.
    pub rb_jacobian: EimJacobian,
    /// Jacobian of finite-element solves with interpolated nonlinearity.
    pub snapshot_jacobian: EimJacobian,
    /// Study checkpoints; `None` picks five evenly spaced ones.
    pub checkpoints: Option<Vec<(usize, usize)>>,
    /// Where results go.
    pub output_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            mesh_n: 32,
            degree: 2,
            train_n1: 20,
            train_n2: 20,
            train_spacing: Spacing::Log,
            test_count: 225,
            test_seed: 42,
            strategy: Strategy::Standard,
            rebuild_wn: false,
            n_max: 20,
            m_max: 25,
            saturation_tol: DEFAULT_SATURATION_TOL,
            newton: NewtonConfig::default(),
            snapshot_source: SnapshotSource::TruthWithEim,
            rb_jacobian: EimJacobian::DerivativeEim,
            snapshot_jacobian: EimJacobian::Consistent,
            checkpoints: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Keys that do not change the trained model.
const STUDY_KEYS: [&str; 4] = ["test.count", "test.seed", "study.checkpoints", "output.dir"];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value.parse().map_err(|e| CliError::Config(format!("{key} = {value}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key} = {value}: expected true or false"))),
    }
}

fn parse_jacobian(key: &str, value: &str) -> Result<EimJacobian> {
    match value {
        "derivative-eim" => Ok(EimJacobian::DerivativeEim),
        "consistent" => Ok(EimJacobian::Consistent),
        _ => Err(CliError::Config(format!("{key} = {value}: expected derivative-eim or consistent"))),
    }
}

fn jacobian_name(j: EimJacobian) -> &'static str {
    match j {
        EimJacobian::DerivativeEim => "derivative-eim",
        EimJacobian::Consistent => "consistent",
    }
}

fn parse_checkpoints(key: &str, value: &str) -> Result<Vec<(usize, usize)>> {
    value
        .split(',')
        .map(|pair| {
            let (n, m) = pair
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("{key}: expected N:M pairs, got {pair:?}")))?;
            Ok((parse_value(key, n.trim())?, parse_value(key, m.trim())?))
        })
        .collect()
}

/// Five checkpoints `(⌊N k/5⌉, ⌊M k/5⌉)`, `k = 1..5`, without repeats.
pub fn default_checkpoints(n_max: usize, m_max: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (1..=5)
        .map(|k| (((2 * n_max * k + 5) / 10).max(1), ((2 * m_max * k + 5) / 10).max(1)))
        .collect();
    out.dedup();
    out
}

impl Config {
    /// Parses configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.insert(key.to_string(), lineno + 1).is_some() {
                return Err(CliError::Config(format!("line {}: {key} given twice", lineno + 1)));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Config::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mesh.n" => self.mesh_n = parse_value(key, value)?,
            "fem.degree" => self.degree = parse_value(key, value)?,
            "train.grid_n1" => self.train_n1 = parse_value(key, value)?,
            "train.grid_n2" => self.train_n2 = parse_value(key, value)?,
            "train.spacing" => {
                self.train_spacing = match value {
                    "log" => Spacing::Log,
                    "linear" => Spacing::Linear,
                    _ => return Err(CliError::Config(format!("{key} = {value}: expected log or linear"))),
                }
            }
            "test.count" => self.test_count = parse_value(key, value)?,
            "test.seed" => self.test_seed = parse_value(key, value)?,
            "ser.r" => {
                self.strategy = match value {
                    "standard" | "M" => Strategy::Standard,
                    _ => Strategy::Frequency(parse_value(key, value)?),
                }
            }
            "ser.rebuild_wn" => self.rebuild_wn = parse_bool(key, value)?,
            "ser.n_max" => self.n_max = parse_value(key, value)?,
            "ser.snapshot_source" => {
                self.snapshot_source = match value {
                    "eim" => SnapshotSource::TruthWithEim,
                    "exact" => SnapshotSource::TruthExact,
                    _ => return Err(CliError::Config(format!("{key} = {value}: expected eim or exact"))),
                }
            }
            "ser.rb_jacobian" => self.rb_jacobian = parse_jacobian(key, value)?,
            "ser.snapshot_jacobian" => self.snapshot_jacobian = parse_jacobian(key, value)?,
            "eim.m_max" => self.m_max = parse_value(key, value)?,
            "eim.saturation_tol" => self.saturation_tol = parse_value(key, value)?,
            "newton.abs_tol" => self.newton.abs_tol = parse_value(key, value)?,
            "newton.rel_tol" => self.newton.rel_tol = parse_value(key, value)?,
            "newton.max_iter" => self.newton.max_iter = parse_value(key, value)?,
            "study.checkpoints" => self.checkpoints = Some(parse_checkpoints(key, value)?),
            "output.dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(CliError::Config(format!("unknown key {key}"))),
        }
        Ok(())
    }

    /// Checks ranges that the core does not check itself.
    pub fn validate(&self) -> Result<()> {
        if self.mesh_n == 0 || !(1..=3).contains(&self.degree) {
            return Err(CliError::Config("mesh.n must be positive and fem.degree in 1..=3".into()));
        }
        if self.train_n1 == 0 || self.train_n2 == 0 || self.test_count == 0 {
            return Err(CliError::Config("training grid and test set must be nonempty".into()));
        }
        if self.n_max > self.train_n1 * self.train_n2 {
            return Err(CliError::Config("ser.n_max exceeds the training set size".into()));
        }
        if let Some(cps) = &self.checkpoints {
            if cps.is_empty() || cps.iter().any(|&(n, m)| n == 0 || m == 0 || n > self.n_max || m > self.m_max) {
                return Err(CliError::Config("study.checkpoints must lie within 1..=n_max × 1..=m_max".into()));
            }
        }
        self.ser_config().validate().map_err(|e| CliError::Config(e.to_string()))
    }

    /// Every key with its normalized value, one `key = value` per line in key order.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    fn entries(&self) -> BTreeMap<&'static str, String> {
        let strategy = match self.strategy {
            Strategy::Standard => "standard".to_string(),
            Strategy::Frequency(r) => r.to_string(),
        };
        let checkpoints = self
            .study_checkpoints()
            .iter()
            .map(|(n, m)| format!("{n}:{m}"))
            .collect::<Vec<_>>()
            .join(",");
        BTreeMap::from([
            ("mesh.n", self.mesh_n.to_string()),
            ("fem.degree", self.degree.to_string()),
            ("train.grid_n1", self.train_n1.to_string()),
            ("train.grid_n2", self.train_n2.to_string()),
            (
                "train.spacing",
                match self.train_spacing {
                    Spacing::Log => "log",
                    Spacing::Linear => "linear",
                }
                .to_string(),
            ),
            ("test.count", self.test_count.to_string()),
            ("test.seed", self.test_seed.to_string()),
            ("ser.r", strategy),
            ("ser.rebuild_wn", self.rebuild_wn.to_string()),
            ("ser.n_max", self.n_max.to_string()),
            (
                "ser.snapshot_source",
                match self.snapshot_source {
                    SnapshotSource::TruthWithEim => "eim",
                    SnapshotSource::TruthExact => "exact",
                }
                .to_string(),
            ),
            ("ser.rb_jacobian", jacobian_name(self.rb_jacobian).to_string()),
            ("ser.snapshot_jacobian", jacobian_name(self.snapshot_jacobian).to_string()),
            ("eim.m_max", self.m_max.to_string()),
            ("eim.saturation_tol", format!("{:?}", self.saturation_tol)),
            ("newton.abs_tol", format!("{:?}", self.newton.abs_tol)),
            ("newton.rel_tol", format!("{:?}", self.newton.rel_tol)),
            ("newton.max_iter", self.newton.max_iter.to_string()),
            ("study.checkpoints", checkpoints),
            ("output.dir", self.output_dir.display().to_string()),
        ])
    }

    /// SHA-256 of the keys that determine the trained model (test set, checkpoints and output
    /// directory excluded).
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.entries() {
            if !STUDY_KEYS.contains(&k) {
                hasher.update(format!("{k} = {v}\n"));
            }
        }
        format!("{:x}", hasher.finalize())
    }

    /// Build settings for the core.
    pub fn ser_config(&self) -> SerConfig {
        SerConfig {
            strategy: self.strategy,
            rebuild_wn: self.rebuild_wn,
            n_max: self.n_max,
            m_max: self.m_max,
            snapshot_source: self.snapshot_source,
            newton: self.newton,
            rb_jacobian: self.rb_jacobian,
            snapshot_jacobian: self.snapshot_jacobian,
            saturation_tol: self.saturation_tol,
            checkpoints: if self.rebuild_wn { self.study_checkpoints() } else { Vec::new() },
        }
    }

    /// Table label of the configured variant.
    pub fn label(&self) -> String {
        self.ser_config().label()
    }

    /// Checkpoints of the error study.
    pub fn study_checkpoints(&self) -> Vec<(usize, usize)> {
        self.checkpoints.clone().unwrap_or_else(|| default_checkpoints(self.n_max, self.m_max))
    }

    /// Training set Ξ.
    pub fn training_set(&self) -> Result<SampleSet> {
        Ok(SampleSet::benchmark(SampleGeneration::Grid {
            n1: self.train_n1,
            n2: self.train_n2,
            spacing: self.train_spacing,
        })?)
    }

    /// Log-uniform random test set.
    pub fn test_set(&self) -> Result<SampleSet> {
        Ok(SampleSet::benchmark(SampleGeneration::LogRandom {
            count: self.test_count,
            seed: self.test_seed,
        })?)
    }

    /// The benchmark problem on the configured mesh.
    pub fn truth_problem(&self) -> Result<TruthProblem<ExponentialReaction>> {
        let space = FeSpace::new(Mesh::new(self.mesh_n)?, self.degree)?;
        Ok(TruthProblem::new(space, benchmark_nonlinearity(), source)?)
    }

    /// The four compared variants: standard and `r = 5` with `(N, M)`, and `r = 1` with and
    /// without rebuild at `N = M`.
    pub fn compare_variants(&self) -> Vec<Config> {
        let variant = |strategy, rebuild_wn, n_max| Config {
            strategy,
            rebuild_wn,
            n_max,
            checkpoints: None,
            ..self.clone()
        };
        vec![
            variant(Strategy::Standard, false, self.n_max),
            variant(Strategy::Frequency(5), false, self.n_max),
            variant(Strategy::Frequency(1), true, self.m_max),
            variant(Strategy::Frequency(1), false, self.m_max),
        ]
    }
}

//! The exponential-reaction benchmark on the unit square and its parameter samples.
//!
//! `-Δu + μ₁ (exp(μ₂ u) − 1) / μ₂ = 100 sin(2πx) sin(2πy)` with `u = 0` on `∂Ω` and
//! `μ ∈ [0.01, 10]²`; the output of interest is the mean of `u` over `Ω`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, NonlinearTerm, Parameter, Result};

/// Lower corner of the benchmark parameter box.
pub const MU_MIN: f64 = 0.01;
/// Upper corner of the benchmark parameter box.
pub const MU_MAX: f64 = 10.0;

/// `g(u; μ) = μ₁ (exp(μ₂ u) − 1) / μ₂`, evaluated with `expm1` so small `μ₂ u` loses no digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialReaction;

impl NonlinearTerm for ExponentialReaction {
    fn value(&self, u: f64, _x: [f64; 2], mu: &Parameter) -> f64 {
        mu.mu1() * (mu.mu2() * u).exp_m1() / mu.mu2()
    }

    fn derivative(&self, u: f64, _x: [f64; 2], mu: &Parameter) -> f64 {
        mu.mu1() * (mu.mu2() * u).exp()
    }
}

/// The benchmark nonlinearity.
pub fn benchmark_nonlinearity() -> ExponentialReaction {
    ExponentialReaction
}

/// Right-hand side `100 sin(2πx) sin(2πy)`.
pub fn source(x: [f64; 2]) -> f64 {
    100.0 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin()
}

/// Spacing of a tensor grid of parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Spacing {
    /// Equidistant in `log10 μ`.
    Log,
    /// Equidistant in `μ`.
    Linear,
}

/// How a [`SampleSet`] was generated; regenerating from it is deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SampleGeneration {
    /// `n1 × n2` tensor grid over the box.
    Grid {
        /// Points along `μ₁`.
        n1: usize,
        /// Points along `μ₂`.
        n2: usize,
        /// Point spacing.
        spacing: Spacing,
    },
    /// Independent draws, uniform in `log10 μ`.
    LogRandom {
        /// Number of draws.
        count: usize,
        /// Seed of the ChaCha8 generator.
        seed: u64,
    },
}

/// An ordered, finite subset of the parameter box.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    generation: SampleGeneration,
    points: Vec<Parameter>,
}

impl SampleSet {
    /// Generates the samples over `[lo, hi]²`.
    ///
    /// Grids are ordered lexicographically on `(μ₁, μ₂)`, so the first point is the lower corner.
    pub fn generate(generation: SampleGeneration, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::invalid("parameter box needs 0 < lo < hi"));
        }
        let points = match generation {
            SampleGeneration::Grid { n1, n2, spacing } => {
                if n1 == 0 || n2 == 0 {
                    return Err(Error::invalid("grid sample needs at least one point per axis"));
                }
                let a1 = axis(n1, lo, hi, spacing);
                let a2 = axis(n2, lo, hi, spacing);
                let mut pts = Vec::with_capacity(n1 * n2);
                for &m1 in &a1 {
                    for &m2 in &a2 {
                        pts.push(Parameter::new(m1, m2));
                    }
                }
                pts
            }
            SampleGeneration::LogRandom { count, seed } => {
                if count == 0 {
                    return Err(Error::invalid("random sample needs at least one point"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (l0, l1) = (lo.log10(), hi.log10());
                (0..count)
                    .map(|_| {
                        let a: f64 = rng.random_range(l0..l1);
                        let b: f64 = rng.random_range(l0..l1);
                        Parameter::new(10f64.powf(a), 10f64.powf(b))
                    })
                    .collect()
            }
        };
        Ok(SampleSet { generation, points })
    }

    /// Generates the samples over the benchmark box `[0.01, 10]²`.
    pub fn benchmark(generation: SampleGeneration) -> Result<Self> {
        Self::generate(generation, MU_MIN, MU_MAX)
    }

    /// Wraps explicit points.
    pub fn from_points(points: Vec<Parameter>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("sample set must not be empty"));
        }
        let count = points.len();
        Ok(SampleSet {
            generation: SampleGeneration::LogRandom { count, seed: 0 },
            points,
        })
    }

    /// Generation descriptor.
    pub fn generation(&self) -> SampleGeneration {
        self.generation
    }

    /// The points, in order.
    pub fn points(&self) -> &[Parameter] {
        &self.points
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the set is empty (never true for generated sets).
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn axis(n: usize, lo: f64, hi: f64, spacing: Spacing) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                return lo;
            }
            if i == n - 1 {
                return hi;
            }
            let t = i as f64 / (n - 1) as f64;
            match spacing {
                Spacing::Log => 10f64.powf(lo.log10() + t * (hi.log10() - lo.log10())),
                Spacing::Linear => lo + t * (hi - lo),
            }
        })
        .collect()
}

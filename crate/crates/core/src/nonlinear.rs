//! Parameters and pointwise nonlinearities.

use core::fmt;

/// A point `mu = (mu1, mu2)` of the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Parameter(pub [f64; 2]);

impl Parameter {
    /// Creates a parameter from its two components.
    pub const fn new(mu1: f64, mu2: f64) -> Self {
        Parameter([mu1, mu2])
    }

    /// First component.
    pub fn mu1(&self) -> f64 {
        self.0[0]
    }

    /// Second component.
    pub fn mu2(&self) -> f64 {
        self.0[1]
    }

    /// Exact (bitwise) equality, used to recognise repeated greedy selections.
    pub fn same_as(&self, other: &Parameter) -> bool {
        self.0[0].to_bits() == other.0[0].to_bits() && self.0[1].to_bits() == other.0[1].to_bits()
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// A nonlinearity `g(u, x; mu)` entering the weak form as `∫ g(u) v`, with its derivative in `u`.
///
/// The derivative drives the Newton Jacobian and is interpolated by its own EIM.
pub trait NonlinearTerm: Sync {
    /// Pointwise value `g(u, x; mu)`.
    fn value(&self, u: f64, x: [f64; 2], mu: &Parameter) -> f64;

    /// Pointwise derivative `∂g/∂u (u, x; mu)`.
    fn derivative(&self, u: f64, x: [f64; 2], mu: &Parameter) -> f64;
}

/// The zero nonlinearity; turns every problem into a linear Poisson problem.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoReaction;

impl NonlinearTerm for NoReaction {
    fn value(&self, _u: f64, _x: [f64; 2], _mu: &Parameter) -> f64 {
        0.0
    }

    fn derivative(&self, _u: f64, _x: [f64; 2], _mu: &Parameter) -> f64 {
        0.0
    }
}

/// Evaluates `term` at every node, given nodal values `u` and node coordinates.
pub(crate) fn nodal_values<T: NonlinearTerm + ?Sized>(
    term: &T,
    u: &[f64],
    coords: &[[f64; 2]],
    mu: &Parameter,
    derivative: bool,
) -> alloc::vec::Vec<f64> {
    u.iter()
        .zip(coords)
        .map(|(&ui, &x)| {
            if derivative {
                term.derivative(ui, x, mu)
            } else {
                term.value(ui, x, mu)
            }
        })
        .collect()
}

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Gauss–Legendre nodes and weights on `[0, 1]` with `k` points (exact to degree `2k - 1`).
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1);
    let mut nodes = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for i in 0..k {
        // Newton on P_k starting from the Chebyshev-like guess.
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(k, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `(P_k(x), P_k'(x))` by the three-term recurrence.
fn legendre(k: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature on the reference triangle `{(x, y) : x, y ≥ 0, x + y ≤ 1}`.
///
/// Collapsed (Duffy) tensor Gauss rule; weights sum to the reference area `1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    /// Points in reference coordinates.
    pub points: Vec<[f64; 2]>,
    /// Weights.
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Rule integrating every polynomial of total degree `degree` exactly.
    pub fn exact_to(degree: usize) -> Self {
        // The collapse adds one power of (1 - s) to the integrand in s.
        let k = (degree + 2).div_ceil(2).max(1);
        let (nodes, weights) = gauss_legendre(k);
        let mut points = Vec::with_capacity(k * k);
        let mut w = Vec::with_capacity(k * k);
        for (s, ws) in nodes.iter().zip(&weights) {
            for (t, wt) in nodes.iter().zip(&weights) {
                points.push([*s, t * (1.0 - s)]);
                w.push(ws * wt * (1.0 - s));
            }
        }
        TriangleRule { points, weights: w }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for k in 1..8 {
            let (x, w) = gauss_legendre(k);
            for p in 0..(2 * k) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p)).sum();
                assert_relative_eq!(q, 1.0 / (p + 1) as f64, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn triangle_rules_exact_for_monomials() {
        for degree in [4, 6, 8, 12] {
            let rule = TriangleRule::exact_to(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert_relative_eq!(q, exact, epsilon = 1e-14, max_relative = 1e-13);
                }
            }
        }
    }
}

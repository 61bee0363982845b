//! Gauss–Legendre rules mapped to arbitrary intervals.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(1)).unwrap();
        let rule = GaussLegendre::new(n);
        let mut pairs: Vec<(f64, f64)> = rule
            .nodes()
            .copied()
            .zip(rule.weights().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(t, w)| w * f(t)).sum()
    }
}

/// Rules of every order `1..=max_order`, built once and shared.
#[derive(Debug, Clone)]
pub struct GaussFamily {
    rules: Vec<GaussRule>,
}

impl GaussFamily {
    pub fn up_to(max_order: usize) -> Self {
        GaussFamily {
            rules: (1..=max_order.max(1)).map(GaussRule::new).collect(),
        }
    }

    pub fn max_order(&self) -> usize {
        self.rules.len()
    }

    /// The rule with `n` points, clamped to the available range.
    pub fn rule(&self, n: usize) -> &GaussRule {
        &self.rules[n.clamp(1, self.rules.len()) - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussRule::new(5);
        // degree 9 is the limit for 5 points
        let exact = (2.0f64.powi(10) - 1.0) / 10.0;
        let got = rule.integrate(1.0, 2.0, |t| t.powi(9));
        assert!((got - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn nodes_sorted_weights_sum_to_two() {
        let rule = GaussRule::new(32);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }
}

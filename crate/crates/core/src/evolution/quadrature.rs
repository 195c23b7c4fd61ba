//! Time quadratures on `[0, T]`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Quadrature family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// Composite Gauss-Legendre with panels of [`GL_ORDER`] points.
    GaussLegendre,
    /// Composite trapezoid.
    Trapezoid,
}

/// Points per Gauss-Legendre panel.
pub const GL_ORDER: usize = 12;

/// Nodes and weights on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub rule: QuadratureRule,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let Some(degree) = NonZeroUsize::new(n) else {
        return (Vec::new(), Vec::new());
    };
    let mut pairs = GaussLegendre::new(degree).into_node_weight_pairs().into_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

impl Quadrature {
    /// `n` nodes on `[0, t]`; Gauss-Legendre rounds `n` up to whole panels.
    pub fn new(rule: QuadratureRule, n: usize, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid("T", t, "a positive time"));
        }
        match rule {
            QuadratureRule::GaussLegendre => {
                let panels = n.div_ceil(GL_ORDER).max(1);
                let (x, w) = gauss_legendre(GL_ORDER);
                let h = t / panels as f64;
                let mut nodes = Vec::with_capacity(panels * GL_ORDER);
                let mut weights = Vec::with_capacity(panels * GL_ORDER);
                for p in 0..panels {
                    let a = p as f64 * h;
                    for (xi, wi) in x.iter().zip(&w) {
                        nodes.push(a + 0.5 * h * (xi + 1.0));
                        weights.push(0.5 * h * wi);
                    }
                }
                Ok(Quadrature { rule, nodes, weights })
            }
            QuadratureRule::Trapezoid => {
                if n < 2 {
                    return Err(Error::invalid("n_nodes", n, "at least 2 trapezoid nodes"));
                }
                let h = t / (n - 1) as f64;
                let nodes = (0..n).map(|i| i as f64 * h).collect();
                let weights = (0..n)
                    .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
                    .collect();
                Ok(Quadrature { rule, nodes, weights })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_nodes() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let q = Quadrature::new(QuadratureRule::GaussLegendre, 24, 2.0).unwrap();
        let integral: f64 = q.nodes.iter().zip(&q.weights).map(|(t, w)| w * t.powi(23)).sum();
        assert!((integral - 2f64.powi(24) / 24.0).abs() < 1e-8 * integral);
        let total: f64 = q.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integral() {
        let (t, omega) = (3.0, 40.0);
        let q = Quadrature::new(QuadratureRule::GaussLegendre, 12 * 40, t).unwrap();
        let num: f64 = q.nodes.iter().zip(&q.weights).map(|(s, w)| w * (omega * s).cos()).sum();
        assert!((num - (omega * t).sin() / omega).abs() < 1e-13);
    }
}

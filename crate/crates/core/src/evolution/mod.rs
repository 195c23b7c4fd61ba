//! Fractional Schrödinger propagation and observability costs computed
//! from the Gramian on a frequency-truncated data class.

mod gramian;
mod quadrature;

pub use gramian::{
    arb_time_shape_check, cost_curve, default_nodes, linear_fit, miller_cost, observability_gramian, required_nodes,
    shape_fit, CostCurve, GramianOptions, GramianReport, LinearFit, PropagatorSpec, ShapeFit,
};
pub use quadrature::{gauss_legendre, Quadrature, QuadratureRule, GL_ORDER};

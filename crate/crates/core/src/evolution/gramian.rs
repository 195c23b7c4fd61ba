//! The fractional Schrödinger group, observability Gramians and cost
//! curves.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{Quadrature, QuadratureRule, GL_ORDER};
use crate::geometry::ObservationField;
use crate::spectral::{build_mask, dense_extreme, Compression, EigenOptions, Extreme, MaskKind, SpectralGrid};
use crate::{Error, Result};

/// `S_beta(t) = exp(-i |xi|^(beta+1) t)` on the lattice of `grid`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSpec {
    pub grid: SpectralGrid,
    pub beta: f64,
}

impl PropagatorSpec {
    pub fn new(grid: SpectralGrid, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(PropagatorSpec { grid, beta })
    }

    /// Multiplier exponent `beta + 1`.
    pub fn exponent(&self) -> f64 {
        self.beta + 1.0
    }

    /// Applies `S_beta(t)` to Fourier coefficients stored in FFT order.
    pub fn propagate(&self, u_hat: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        if u_hat.len() != self.grid.len() {
            return Err(Error::invalid("u_hat", u_hat.len(), format!("{} coefficients", self.grid.len())));
        }
        let mut out = u_hat.to_vec();
        for k in self.grid.points() {
            let xi = self.grid.xi(k);
            let phase = -xi[0].hypot(xi[1]).powf(self.exponent()) * t;
            out[self.grid.fft_index(k)] *= Complex64::from_polar(1.0, phase);
        }
        Ok(out)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid("beta", beta, "a value in the range [0,1]"));
    }
    Ok(())
}

/// Smallest node count accepted for cutoff `K`: four nodes per period of
/// the fastest phase, `4 K^(beta+1) T / (2 pi)`.
pub fn required_nodes(cutoff: f64, beta: f64, t: f64) -> usize {
    (4.0 * cutoff.powf(beta + 1.0) * t / (2.0 * PI)).ceil().max(2.0) as usize
}

/// Default node count: Gauss-Legendre panels over which every phase
/// difference turns by at most `pi`, or twice the guard for trapezoid.
pub fn default_nodes(rule: QuadratureRule, cutoff: f64, beta: f64, t: f64) -> usize {
    match rule {
        QuadratureRule::GaussLegendre => {
            GL_ORDER * (cutoff.powf(beta + 1.0) * t / PI).ceil().max(1.0) as usize
        }
        QuadratureRule::Trapezoid => 2 * required_nodes(cutoff, beta, t),
    }
}

/// Knobs of [`observability_gramian`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramianOptions {
    pub rule: QuadratureRule,
    /// Node count; `None` uses [`default_nodes`].
    pub n_nodes: Option<usize>,
    pub eigen: EigenOptions,
}

impl Default for GramianOptions {
    fn default() -> Self {
        GramianOptions {
            rule: QuadratureRule::GaussLegendre,
            n_nodes: None,
            eigen: EigenOptions::default(),
        }
    }
}

/// Smallest eigenvalue of the observability Gramian on `|xi| <= K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramianReport {
    pub t: f64,
    pub beta: f64,
    pub rule: QuadratureRule,
    pub n_nodes: usize,
    pub cutoff: f64,
    pub rank: usize,
    pub lambda_min: f64,
    /// `1 / lambda_min`: a lower bound for the cost on all of `L^2`.
    pub kappa: f64,
    pub residual: f64,
}

/// `G_T = sum_q w_q S(t_q)^* M_a S(t_q)` on the span of `|xi| <= K`.
///
/// In Fourier coordinates `G_T[i, j] = a_hat[k_i - k_j] E[i, j]` with
/// `E = V diag(w) V^*`, `V[i, q] = exp(i omega_i t_q)`.
pub fn observability_gramian(
    field: &ObservationField,
    beta: f64,
    t: f64,
    cutoff: f64,
    options: &GramianOptions,
) -> Result<GramianReport> {
    check_beta(beta)?;
    let grid = SpectralGrid::of_field(field)?;
    if !(cutoff > 0.0 && cutoff < grid.nyquist()) {
        return Err(Error::invalid(
            "cutoff_K",
            cutoff,
            format!("a radius in (0, pi N / P = {})", grid.nyquist()),
        ));
    }
    let required = required_nodes(cutoff, beta, t);
    let n_nodes = options
        .n_nodes
        .unwrap_or_else(|| default_nodes(options.rule, cutoff, beta, t));
    if n_nodes < required {
        return Err(Error::precondition(format!(
            "{n_nodes} time nodes do not resolve the fastest phase; at least {required} are required"
        )));
    }
    let quad = Quadrature::new(options.rule, n_nodes, t)?;
    let mask = build_mask(grid, MaskKind::Ball { radius: cutoff })?;
    let rank = mask.rank();
    let omega: Vec<f64> = (0..rank).map(|i| mask.norm(i).powf(beta + 1.0)).collect();
    let a_hat = Compression::new(&mask, field.values().to_vec())?.dense();
    let v = DMatrix::from_fn(rank, quad.len(), |i, q| Complex64::from_polar(1.0, omega[i] * quad.nodes[q]));
    let vw = DMatrix::from_fn(rank, quad.len(), |i, q| v[(i, q)] * quad.weights[q]);
    let e = vw * v.adjoint();
    let g = a_hat.component_mul(&e);
    let pair = dense_extreme(g, Extreme::Smallest, &options.eigen)?;
    let lambda_min = pair.value;
    Ok(GramianReport {
        t,
        beta,
        rule: quad.rule,
        n_nodes: quad.len(),
        cutoff,
        rank,
        lambda_min,
        kappa: if lambda_min > pair.residual.max(1e-300) {
            1.0 / lambda_min
        } else {
            f64::INFINITY
        },
        residual: pair.residual,
    })
}

/// Gramian reports along a list of times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostCurve {
    pub reports: Vec<GramianReport>,
    /// `kappa` non-increasing along increasing `T` (relative slack `1e-9`).
    pub monotone: bool,
}

pub fn cost_curve(
    field: &ObservationField,
    beta: f64,
    t_list: &[f64],
    cutoff: f64,
    options: &GramianOptions,
) -> Result<CostCurve> {
    let reports = t_list
        .par_iter()
        .map(|&t| observability_gramian(field, beta, t, cutoff, options))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<&GramianReport> = reports.iter().collect();
    order.sort_by(|a, b| a.t.total_cmp(&b.t));
    let monotone = order
        .windows(2)
        .all(|w| w[1].kappa <= w[0].kappa * (1.0 + 1e-9) || w[0].kappa.is_infinite());
    Ok(CostCurve { reports, monotone })
}

/// Predicted cost `m T / (T^2 - M (pi^2 + eps))` with the undetermined
/// constant set to one; `None` at or below the time threshold.
pub fn miller_cost(m_res: f64, m_obs: f64, t: f64, eps: f64) -> Option<f64> {
    let gap = t * t - m_res * (PI * PI + eps);
    (eps > 0.0 && gap > 1e-12 * t * t).then(|| m_obs * t / gap)
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared: if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 },
    }
}

/// Fit of `log kappa` against `T^(2 - 4/eps)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeFit {
    pub eps_decay: f64,
    pub exponent: f64,
    pub times: Vec<f64>,
    pub log_kappa: Vec<f64>,
    pub fit: LinearFit,
    pub min_r_squared: f64,
    pub pass: bool,
}

/// Checks that `log kappa(T)` follows an affine function of
/// `T^(2 - 4/eps)` with non-negative slope and `R^2 >= min_r_squared`.
pub fn arb_time_shape_check(curve: &CostCurve, eps_decay: f64, min_r_squared: f64) -> Result<ShapeFit> {
    if !(eps_decay > 0.0 && eps_decay <= 1.0) {
        return Err(Error::invalid("eps_decay", eps_decay, "a value in (0, 1]"));
    }
    let exponent = 2.0 - 4.0 / eps_decay;
    shape_fit(curve, eps_decay, exponent, min_r_squared)
}

/// [`arb_time_shape_check`] with an explicit envelope exponent.
pub fn shape_fit(curve: &CostCurve, eps_decay: f64, exponent: f64, min_r_squared: f64) -> Result<ShapeFit> {
    if curve.reports.len() < 3 || curve.reports.iter().any(|r| !r.kappa.is_finite()) {
        return Err(Error::precondition("the shape fit needs at least three finite costs"));
    }
    let times: Vec<f64> = curve.reports.iter().map(|r| r.t).collect();
    let log_kappa: Vec<f64> = curve.reports.iter().map(|r| r.kappa.ln()).collect();
    let x: Vec<f64> = times.iter().map(|t| t.powf(exponent)).collect();
    let fit = linear_fit(&x, &log_kappa);
    Ok(ShapeFit {
        eps_decay,
        exponent,
        pass: fit.slope >= 0.0 && fit.r_squared >= min_r_squared,
        times,
        log_kappa,
        fit,
        min_r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_and_unitarity() {
        let g = SpectralGrid::new(1, 64, 8.0).unwrap();
        let s = PropagatorSpec::new(g, 1.0).unwrap();
        let u: Vec<Complex64> = (0..64).map(|i| Complex64::new((i as f64).cos(), 0.1 * i as f64)).collect();
        let a = s.propagate(&s.propagate(&u, 0.3).unwrap(), 0.4).unwrap();
        let b = s.propagate(&u, 0.7).unwrap();
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
        assert!((norm(&b) - norm(&u)).abs() < 1e-12 * norm(&u));
        assert_eq!(s.propagate(&u, 0.0).unwrap(), u);
    }

    #[test]
    fn constant_field_gramian_is_t() {
        let f = ObservationField::constant(1, 8.0, 128, 1.0).unwrap();
        for t in [0.1, 1.0, 2.5] {
            let r = observability_gramian(&f, 1.0, t, 20.0, &GramianOptions::default()).unwrap();
            assert!((r.lambda_min - t).abs() < 1e-10 * t);
        }
    }

    #[test]
    fn nyquist_guard() {
        let f = ObservationField::constant(1, 8.0, 128, 1.0).unwrap();
        let opts = GramianOptions {
            n_nodes: Some(3),
            ..Default::default()
        };
        let err = observability_gramian(&f, 1.0, 1.0, 20.0, &opts).unwrap_err();
        assert!(err.to_string().contains(&required_nodes(20.0, 1.0, 1.0).to_string()));
        assert!(observability_gramian(&f, 1.5, 1.0, 20.0, &GramianOptions::default()).is_err());
    }

    #[test]
    fn miller_threshold() {
        assert_eq!(miller_cost(0.0, 2.0, 4.0, 0.1), Some(0.5));
        assert_eq!(miller_cost(1.0, 1.0, (PI * PI + 0.1f64).sqrt(), 0.1), None);
    }
}

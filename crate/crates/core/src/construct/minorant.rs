//! Smooth minorants of relatively dense ball systems.

use serde::{Deserialize, Serialize};

use super::partition::{build_partition, transfer_function, AlmostPeriodicPartition, BallSystem, SampledFunction};
use crate::{Error, Result};

/// Constants of the plateau bump `b_I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpConstants {
    /// `int b_I = c1 |I|`.
    pub c1: f64,
    /// `|d^m b_I| <= c2^m |I|^-m` for `m <= 3`.
    pub c2: f64,
}

/// The quintic smoothstep plateau bump: `1` on the middle half of `I`,
/// `S(2(1 - |u|))` on the outer quarters with `S = 6s^5 - 15s^4 + 10s^3`.
/// Its mass is `3|I|/4` and the third derivative peaks at `480 / r^3` with
/// `r = |I|/2`, which gives `c2 = 3840^(1/3)`; lower orders are smaller.
pub const BUMP: BumpConstants = BumpConstants {
    c1: 0.75,
    c2: 15.659_470_564_675_452,
};

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 + s * (6.0 * s - 15.0))
}

/// Plateau bump on `(-1, 1)`.
pub fn bump(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 {
        1.0
    } else {
        smoothstep(2.0 * (1.0 - a))
    }
}

/// Resolution and tolerance knobs of [`smooth_minorant`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorantOptions {
    /// Minimum number of grid steps across the thinnest admissible bump
    /// (of width `rho delta`).
    pub nodes_per_bump: f64,
    /// Tolerance on the cell means of `a`.
    pub mean_tol: f64,
}

impl Default for MinorantOptions {
    fn default() -> Self {
        MinorantOptions {
            nodes_per_bump: 40.0,
            mean_tol: 1e-12,
        }
    }
}

/// Worst observed ratio of a finite-difference derivative to its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub order: usize,
    pub a_max: f64,
    pub a_bound: f64,
    pub transfer_max: f64,
    pub transfer_bound: f64,
    pub pass: bool,
}

/// Result of checking every postcondition of the minorant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorantReport {
    /// `0 <= a <= 1_Y` at every node.
    pub support_ok: bool,
    pub eta_ok: bool,
    /// `t_k` in `[rho/2 (1 - 1e-9), 1]`.
    pub t_range_ok: bool,
    /// Largest deviation of a cell mean of `a` from `eta`.
    pub cell_mean_error: f64,
    /// Smallest mean of `a` over windows of length `2M` inside the
    /// partitioned range.
    pub window_min: f64,
    pub window_ok: bool,
    pub derivatives: Vec<DerivativeCheck>,
    pub pass: bool,
}

/// Smooth `a <= 1_Y` with constant cell means `eta = c1 rho / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothMinorant {
    pub a: SampledFunction,
    pub eta: f64,
    pub rho: f64,
    pub m: f64,
    pub balls: BallSystem,
    pub partition: AlmostPeriodicPartition,
    /// Bump scaling factor of each cell.
    pub t: Vec<f64>,
    pub constants: BumpConstants,
    /// `A(y) = int_0^y (a - eta)` on the partitioned range.
    pub transfer: SampledFunction,
    pub report: MinorantReport,
}

/// Adds `sum_i bump((y - c_i) / (t delta))` over the balls with node
/// centres `centres` to `out[lo..hi]`, returning the sum of added values.
fn add_bumps(out: &mut [f64], lo: usize, hi: usize, centres: &[usize], r_nodes: f64, t: f64) -> f64 {
    let reach = (t * r_nodes).ceil() as usize;
    let mut total = 0.0;
    for &c in centres {
        for j in c.saturating_sub(reach).max(lo)..(c + reach + 1).min(hi) {
            let v = bump((j as f64 - c as f64) / (t * r_nodes));
            out[j] += v;
            total += v;
        }
    }
    total
}

/// Builds the minorant on the nodes of `grid`.
///
/// The ball system is snapped to the grid. The range is partitioned by
/// [`build_partition`], every ball inside cell `k` is replaced by the bump
/// of radius `t_k delta`, and `t_k` is fixed by bisection so that the
/// discrete cell mean equals `eta`. Outside the partitioned range `a = 0`.
pub fn smooth_minorant(
    balls: &BallSystem,
    m: f64,
    rho: f64,
    grid: &SampledFunction,
    options: &MinorantOptions,
) -> Result<SmoothMinorant> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid("rho", rho, "a density in (0, 1]"));
    }
    let h = grid.spacing;
    let delta = balls.delta;
    if !(delta < m / 2.0) {
        return Err(Error::invalid("delta", delta, format!("less than M/2 = {}", m / 2.0)));
    }
    if h > rho * delta / options.nodes_per_bump * (1.0 + 1e-9) {
        return Err(Error::invalid(
            "grid spacing",
            h,
            format!("at most rho delta / {} = {}", options.nodes_per_bump, rho * delta / options.nodes_per_bump),
        ));
    }
    let ind = balls.indicator(grid);
    let width = (m / h).round() as usize;
    let n = grid.len();
    let mut start = 0;
    let mut sum: f64 = ind.values.iter().take(width).sum();
    while start + width <= n {
        if sum / (width as f64) < rho * (1.0 - 1e-12) {
            return Err(Error::precondition(format!(
                "ball system is not (M, rho) = ({m}, {rho}) dense: window [{}, {}) has density {}",
                grid.node(start),
                grid.node(start) + m,
                sum / width as f64
            )));
        }
        if start + width < n {
            sum += ind.values[start + width] - ind.values[start];
        }
        start += 1;
    }

    let partition = build_partition(&ind, balls, m)?;
    let eta = BUMP.c1 * rho / 2.0;
    let r_nodes = delta / h;
    let centre_nodes: Vec<usize> = balls
        .centers
        .iter()
        .map(|&c| ((c - grid.origin) / h).round())
        .filter(|&c| c >= 0.0)
        .map(|c| c as usize)
        .collect();

    let mut a = SampledFunction::zeros(grid.origin, h, n);
    let mut t = Vec::with_capacity(partition.nodes.len() - 1);
    for w in partition.nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let first = centre_nodes.partition_point(|&c| c < lo);
        let last = centre_nodes.partition_point(|&c| c < hi);
        let inside = &centre_nodes[first..last];
        let target = eta * (hi - lo) as f64;
        let mut scratch = vec![0.0; n.min(hi + 1)];
        let mass = |t: f64, buf: &mut Vec<f64>| {
            buf[lo..hi].iter_mut().for_each(|v| *v = 0.0);
            add_bumps(buf, lo, hi, inside, r_nodes, t)
        };
        if mass(1.0, &mut scratch) < target * (1.0 - options.mean_tol) {
            return Err(Error::precondition(format!(
                "cell [{}, {}) carries too little of Y for eta = {eta}",
                grid.node(lo),
                grid.node(hi)
            )));
        }
        let (mut t_lo, mut t_hi) = (0.0, 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (t_lo + t_hi);
            if mass(mid, &mut scratch) < target {
                t_lo = mid;
            } else {
                t_hi = mid;
            }
            if t_hi - t_lo < 1e-15 {
                break;
            }
        }
        add_bumps(&mut a.values, lo, hi, inside, r_nodes, t_hi);
        t.push(t_hi);
    }

    let transfer = transfer_function_loose(&a, eta, &partition);
    let report = verify(&a, &ind, eta, rho, m, delta, &partition, &t, &transfer, options);
    Ok(SmoothMinorant {
        a,
        eta,
        rho,
        m,
        balls: balls.clone(),
        partition,
        t,
        constants: BUMP,
        transfer,
        report,
    })
}

/// Like [`transfer_function`] but without the cell-mean precondition,
/// which [`verify`] reports separately.
fn transfer_function_loose(a: &SampledFunction, eta: f64, partition: &AlmostPeriodicPartition) -> SampledFunction {
    match transfer_function(a, eta, partition) {
        Ok(t) => t.values,
        Err(_) => {
            let (first, last) = (partition.nodes[0], *partition.nodes.last().unwrap());
            let mut values = vec![0.0];
            for j in first..last {
                values.push(values.last().unwrap() + (a.values[j] - eta) * a.spacing);
            }
            SampledFunction {
                origin: a.node(first),
                spacing: a.spacing,
                values,
            }
        }
    }
}

/// Central finite difference of order `m` at interior node `j`.
fn finite_difference(f: &[f64], j: usize, m: usize, h: f64) -> f64 {
    match m {
        0 => f[j],
        1 => (f[j + 1] - f[j - 1]) / (2.0 * h),
        2 => (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (h * h),
        _ => (f[j + 2] - 2.0 * f[j + 1] + 2.0 * f[j - 1] - f[j - 2]) / (2.0 * h * h * h),
    }
}

fn max_derivative(f: &[f64], m: usize, h: f64) -> f64 {
    (2..f.len().saturating_sub(2))
        .map(|j| finite_difference(f, j, m, h).abs())
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    a: &SampledFunction,
    ind: &SampledFunction,
    eta: f64,
    rho: f64,
    m: f64,
    delta: f64,
    partition: &AlmostPeriodicPartition,
    t: &[f64],
    transfer: &SampledFunction,
    options: &MinorantOptions,
) -> MinorantReport {
    let support_ok = a
        .values
        .iter()
        .zip(&ind.values)
        .all(|(&v, &y)| v >= 0.0 && v <= y + 1e-15);
    let cell_mean_error = partition
        .nodes
        .windows(2)
        .map(|w| (a.mean(w[0], w[1]) - eta).abs())
        .fold(0.0, f64::max);
    let t_range_ok = t.iter().all(|&t| t >= rho / 2.0 * (1.0 - 1e-9) && t <= 1.0);
    let (first, last) = (partition.nodes[0], *partition.nodes.last().unwrap());
    let window = (2.0 * m / a.spacing).round() as usize;
    let window_min = a.min_window_mean(first, last, window).map_or(f64::NAN, |w| w.1);
    let scale = rho / 2.0 * delta;
    let h = a.spacing;
    let derivatives: Vec<DerivativeCheck> = (0..=3)
        .map(|order| {
            let a_bound = BUMP.c2.powi(order as i32) * scale.powi(-(order as i32));
            let a_max = max_derivative(&a.values, order, h);
            let transfer_bound = 4.0 * a_bound;
            let transfer_max = max_derivative(&transfer.values, order, h) / m;
            DerivativeCheck {
                order,
                a_max,
                a_bound,
                transfer_max,
                transfer_bound,
                pass: a_max <= a_bound && transfer_max <= transfer_bound,
            }
        })
        .collect();
    let eta_ok = eta >= rho / 4.0;
    let window_ok = window_min >= rho / 8.0;
    MinorantReport {
        pass: support_ok
            && eta_ok
            && t_range_ok
            && cell_mean_error <= options.mean_tol.max(1e-10)
            && window_ok
            && derivatives.iter().all(|d| d.pass),
        support_ok,
        eta_ok,
        t_range_ok,
        cell_mean_error,
        window_min,
        window_ok,
        derivatives,
    }
}

/// Measures `c1` and the smallest `c2` valid for orders `1..=3` by
/// sampling the bump on `(-1, 1)` with `n` points.
pub fn measure_bump_constants(n: usize) -> BumpConstants {
    let h = 2.0 / n as f64;
    let f: Vec<f64> = (0..=n + 4).map(|j| bump(-1.0 + (j as f64 - 2.0) * h)).collect();
    let c1 = f[2..n + 2].iter().sum::<f64>() * h / 2.0;
    let c2 = (1..=3)
        .map(|m| (max_derivative(&f, m, h) * 2f64.powi(m as i32)).powf(1.0 / m as f64))
        .fold(0.0, f64::max);
    BumpConstants { c1, c2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert!((bump(0.75) - 0.5).abs() < 1e-15);
        assert!((BUMP.c2.powi(3) - 3840.0).abs() < 1e-9);
    }

    #[test]
    fn measured_constants_match_table() {
        let c = measure_bump_constants(20_000);
        assert!((c.c1 - BUMP.c1).abs() < 1e-6);
        assert!(c.c1 > 0.5);
        assert!(c.c2 <= BUMP.c2 * (1.0 + 1e-6) && c.c2 > 0.99 * BUMP.c2);
    }

    #[test]
    fn regular_system() {
        let h: f64 = 0.2 * 0.4 / 40.0;
        let n = (8.0 / h).round() as usize;
        let grid = SampledFunction::zeros(-0.5, h, n);
        let balls = BallSystem::new((0..8).map(f64::from).collect(), 0.2).unwrap();
        let sm = smooth_minorant(&balls, 1.0, 0.4, &grid, &MinorantOptions::default()).unwrap();
        assert!(sm.eta >= 0.1);
        assert!(sm.report.pass, "{:?}", sm.report);
        let t0 = sm.t[0];
        assert!(sm.t.iter().all(|&t| (t - t0).abs() < 1e-12));
    }

    #[test]
    fn sparse_system_is_rejected() {
        let grid = SampledFunction::zeros(0.0, 0.001, 8000);
        let balls = BallSystem::new(vec![1.0, 5.0], 0.2).unwrap();
        assert!(smooth_minorant(&balls, 1.0, 0.4, &grid, &MinorantOptions::default()).is_err());
    }
}

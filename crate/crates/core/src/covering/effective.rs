//! Effective coverings of the circle of directions and their verification.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::diophantine::{farey_directions, RationalDirection};
use crate::geometry::Direction;
use crate::{Error, Result};

/// What a covering entry promises about the field in its direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Segments of length `length` along the direction average at least `eta`.
    Gcc { length: f64, eta: f64 },
    /// The comb profile with window `m` is `(l, eta)` relatively dense.
    Comb { m: f64, l: f64, eta: f64 },
}

impl Certificate {
    pub fn eta(&self) -> f64 {
        match self {
            Certificate::Gcc { eta, .. } | Certificate::Comb { eta, .. } => *eta,
        }
    }
}

/// One direction of a covering with its cap half-width `eps` and length `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringEntry {
    pub theta: Direction,
    /// Exact lattice direction, when the entry has one.
    pub rational: Option<RationalDirection>,
    pub eps: f64,
    pub m: f64,
    pub certificate: Certificate,
}

impl CoveringEntry {
    /// `eps M + (eps lambda)^{-1}`.
    pub fn budget(&self, lambda: f64) -> f64 {
        self.eps * self.m + 1.0 / (self.eps * lambda)
    }
}

/// A `(rho, lambda)` effective covering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCovering {
    /// Name of the construction, e.g. `periodic` or `product`.
    pub builder: String,
    pub rho: f64,
    pub lambda: f64,
    pub entries: Vec<CoveringEntry>,
}

/// Largest `rho` such that the periodic covering exists at `lambda`, i.e.
/// `lambda_0 = (20 / rho)^4`.
pub fn periodic_lambda0(rho: f64) -> f64 {
    (20.0 / rho).powi(4)
}

/// Covering for a periodic field carrying an axis-parallel square of side
/// `delta_level` in every unit cell.
///
/// All coprime `(P, Q)` with `T <= 2 lambda^gamma` are used with cap
/// half-width `2 / (lambda^gamma T)`; directions with `T >= 1/delta_level`
/// carry a `(T + 2)` GCC certificate with `eta = delta^2 T / (2 (T + 2))`,
/// the others a `(2T + 4, 1/T)` comb certificate with
/// `eta = T delta^2 / (2T + 4)`.
pub fn periodic_effective_covering(delta_level: f64, rho: f64, lambda: f64, gamma: f64) -> Result<EffectiveCovering> {
    if !(delta_level > 0.0 && delta_level < 1.0) {
        return Err(Error::invalid("delta_level", delta_level, "a square side in (0,1)"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", rho, "a positive budget"));
    }
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::invalid("gamma", gamma, "a value in (0, 1/2)"));
    }
    let lambda0 = periodic_lambda0(rho);
    if !(lambda >= lambda0) {
        return Err(Error::precondition(format!(
            "lambda = {lambda} is below lambda_0 = (20/rho)^4 = {lambda0} for rho = {rho}"
        )));
    }
    let n = lambda.powf(gamma);
    let t0 = 1.0 / delta_level;
    let d2 = delta_level * delta_level;
    let entries = farey_directions(2.0 * n)
        .into_iter()
        .map(|r| {
            let t = r.t();
            let (m, certificate) = if t >= t0 {
                (
                    t + 2.0,
                    Certificate::Gcc {
                        length: t + 2.0,
                        eta: d2 * t / (2.0 * (t + 2.0)),
                    },
                )
            } else {
                (
                    2.0 * t + 4.0,
                    Certificate::Comb {
                        m: 2.0 * t + 4.0,
                        l: 1.0 / t,
                        eta: t * d2 / (2.0 * t + 4.0),
                    },
                )
            };
            CoveringEntry {
                theta: r.direction(),
                rational: Some(r),
                eps: 2.0 / (n * t),
                m,
                certificate,
            }
        })
        .collect();
    Ok(EffectiveCovering {
        builder: "periodic".into(),
        rho,
        lambda,
        entries,
    })
}

/// `lambda_0 = 8 max(L, M) / rho^2` of the product construction.
pub fn product_lambda0(m: f64, l_diag: f64, rho: f64) -> f64 {
    8.0 * m.max(l_diag) / (rho * rho)
}

/// Covering for a product of relatively dense sets with densities
/// `delta1 + delta2 > 1` at unit scale.
///
/// The four axis directions get cap `rho / (4M)` and an `(M, M)` comb
/// certificate with `eta = delta1 delta2`; the directions at least
/// `eps_1 / 2` away from the axes are an angular grid of pitch
/// `eps_2 = rho / (4 L)` carrying `L` GCC certificates with
/// `eta = (delta1 + delta2 - 1) / 2`.
pub fn product_effective_covering(
    m: f64,
    l_diag: f64,
    rho: f64,
    lambda: f64,
    densities: (f64, f64),
) -> Result<EffectiveCovering> {
    if !(m > 0.0 && l_diag > 0.0) {
        return Err(Error::invalid("M, L_diag", format!("{m}, {l_diag}"), "positive lengths"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", rho, "a positive budget"));
    }
    let lambda0 = product_lambda0(m, l_diag, rho);
    if !(lambda >= lambda0) {
        return Err(Error::precondition(format!(
            "lambda = {lambda} is below lambda_0 = 8 max(L, M)/rho^2 = {lambda0}"
        )));
    }
    let (d1, d2) = densities;
    let eps1 = rho / (4.0 * m);
    let eps2 = rho / (4.0 * l_diag);
    let mut entries: Vec<CoveringEntry> = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        .iter()
        .map(|&(p, q)| {
            let r = RationalDirection { p, q };
            CoveringEntry {
                theta: r.direction(),
                rational: Some(r),
                eps: eps1,
                m,
                certificate: Certificate::Comb { m, l: m, eta: d1 * d2 },
            }
        })
        .collect();
    // angles in [a0, pi/2 - a0] with min(|cos|, |sin|) >= eps1 / 2
    let a0 = (0.5 * eps1).min(1.0).asin();
    let span = FRAC_PI_2 - 2.0 * a0;
    if span >= 0.0 {
        let steps = (span / eps2).ceil().max(1.0) as usize;
        let pitch = span / steps as f64;
        for quadrant in 0..4 {
            for k in 0..=steps {
                let angle = quadrant as f64 * FRAC_PI_2 + a0 + k as f64 * pitch;
                entries.push(CoveringEntry {
                    theta: Direction::from_angle(angle),
                    rational: None,
                    eps: eps2,
                    m: l_diag,
                    certificate: Certificate::Gcc {
                        length: l_diag,
                        eta: 0.5 * (d1 + d2 - 1.0),
                    },
                });
            }
        }
    }
    entries.sort_by(|a, b| a.theta.angle().total_cmp(&b.theta.angle()));
    Ok(EffectiveCovering {
        builder: "product".into(),
        rho,
        lambda,
        entries,
    })
}

/// Outcome of [`verify_covering`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub covers: bool,
    /// Uncovered angle intervals in `[0, 2 pi)`.
    pub gaps: Vec<[f64; 2]>,
    pub budget_ok: bool,
    /// Entry with the smallest margin `rho - budget`.
    pub worst_entry: Option<usize>,
    pub worst_margin: f64,
    pub entries: usize,
}

/// Checks that the arcs `{phi : dist(phi, theta) <= eps}` cover the circle
/// (exact interval union on angles) and that every entry satisfies the
/// strict budget `eps M + (eps lambda)^{-1} < rho`.
pub fn verify_covering(cov: &EffectiveCovering) -> CoveringReport {
    let mut arcs: Vec<[f64; 2]> = Vec::with_capacity(cov.entries.len() + 4);
    let mut full = false;
    for e in &cov.entries {
        if e.eps >= PI {
            full = true;
            continue;
        }
        let c = e.theta.angle();
        let (lo, hi) = (c - e.eps, c + e.eps);
        if lo < 0.0 {
            arcs.push([lo + TAU, TAU]);
            arcs.push([0.0, hi]);
        } else if hi > TAU {
            arcs.push([lo, TAU]);
            arcs.push([0.0, hi - TAU]);
        } else {
            arcs.push([lo, hi]);
        }
    }
    let mut gaps = Vec::new();
    if !full {
        arcs.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut reach = 0.0;
        for a in &arcs {
            if a[0] > reach {
                gaps.push([reach, a[0]]);
            }
            reach = f64::max(reach, a[1]);
        }
        if reach < TAU {
            gaps.push([reach, TAU]);
        }
    }
    let mut worst: Option<(usize, f64)> = None;
    for (i, e) in cov.entries.iter().enumerate() {
        let margin = cov.rho - e.budget(cov.lambda);
        if worst.is_none_or(|(_, w)| margin < w) {
            worst = Some((i, margin));
        }
    }
    let worst_margin = worst.map_or(f64::INFINITY, |w| w.1);
    CoveringReport {
        covers: gaps.is_empty(),
        gaps,
        budget_ok: worst_margin > 0.0,
        worst_entry: worst.map(|w| w.0),
        worst_margin,
        entries: cov.entries.len(),
    }
}

//! Frequency lattices of the discretised torus and masks on them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::ObservationField;
use crate::{Error, Result};

/// Torus `(R / P Z)^d` sampled with `N` points per axis. Its frequency
/// lattice is `xi = 2 pi k / P` with `k` in `[-N/2, N/2)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
}

impl SpectralGrid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid("dim", dim, "1 or 2"));
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::invalid("N", n, "an even number of points per axis"));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid("P", period, "a positive period"));
        }
        Ok(SpectralGrid { dim, n, period })
    }

    pub fn of_field(field: &ObservationField) -> Result<Self> {
        SpectralGrid::new(field.dim(), field.n(), field.period())
    }

    /// `2 pi / P`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Aliasing radius `pi N / P`.
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.period
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn xi(&self, k: [i64; 2]) -> [f64; 2] {
        [self.spacing() * k[0] as f64, self.spacing() * k[1] as f64]
    }

    /// Position of lattice point `k` in an FFT array.
    pub fn fft_index(&self, k: [i64; 2]) -> usize {
        let n = self.n as i64;
        let w = |k: i64| k.rem_euclid(n) as usize;
        if self.dim == 1 {
            w(k[0])
        } else {
            w(k[0]) * self.n + w(k[1])
        }
    }

    /// All lattice points in FFT order.
    pub fn points(&self) -> impl Iterator<Item = [i64; 2]> + '_ {
        let half = self.n as i64 / 2;
        let inner = if self.dim == 1 { 0..1 } else { -half..half };
        (-half..half).flat_map(move |a| inner.clone().map(move |b| [a, b]))
    }
}

/// Shape of a frequency mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MaskKind {
    /// `lambda - delta lambda^-beta <= |xi| <= lambda + delta lambda^-beta`.
    Annulus { lambda: f64, delta: f64, beta: f64 },
    /// `|xi/|xi| - theta| < eps0` with `theta = (cos a, sin a)`.
    Sector { angle: f64, eps0: f64 },
    AnnulusSector {
        lambda: f64,
        delta: f64,
        beta: f64,
        angle: f64,
        eps0: f64,
    },
    /// `[zeta, zeta + sigma]^d`.
    Rectangle { zeta: f64, sigma: f64 },
    /// `|xi| <= radius`; an infinite radius selects the whole lattice.
    Ball { radius: f64 },
}

impl MaskKind {
    fn contains(&self, xi: [f64; 2], dim: usize) -> bool {
        let r = xi[0].hypot(xi[1]);
        let annulus = |lambda: f64, delta: f64, beta: f64| {
            let w = delta * lambda.powf(-beta);
            let tol = 1e-12 * lambda.max(1.0);
            r >= lambda - w - tol && r <= lambda + w + tol
        };
        let sector = |angle: f64, eps0: f64| {
            r > 0.0 && {
                let (s, c) = angle.sin_cos();
                (xi[0] / r - c).hypot(xi[1] / r - s) < eps0
            }
        };
        match *self {
            MaskKind::Annulus { lambda, delta, beta } => annulus(lambda, delta, beta),
            MaskKind::Sector { angle, eps0 } => sector(angle, eps0),
            MaskKind::AnnulusSector {
                lambda,
                delta,
                beta,
                angle,
                eps0,
            } => annulus(lambda, delta, beta) && sector(angle, eps0),
            MaskKind::Rectangle { zeta, sigma } => {
                let inside = |x: f64| x >= zeta - 1e-12 && x <= zeta + sigma + 1e-12;
                inside(xi[0]) && (dim == 1 || inside(xi[1]))
            }
            MaskKind::Ball { radius } => r <= radius * (1.0 + 1e-12),
        }
    }

    fn annulus_outer(&self) -> Option<f64> {
        match *self {
            MaskKind::Annulus { lambda, delta, beta } | MaskKind::AnnulusSector { lambda, delta, beta, .. } => {
                Some(lambda + delta * lambda.powf(-beta))
            }
            _ => None,
        }
    }
}

/// Set of lattice frequencies, stored as integer indices `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMask {
    pub grid: SpectralGrid,
    pub kind: MaskKind,
    pub points: Vec<[i64; 2]>,
}

impl FrequencyMask {
    pub fn rank(&self) -> usize {
        self.points.len()
    }

    pub fn xi(&self, i: usize) -> [f64; 2] {
        self.grid.xi(self.points[i])
    }

    pub fn norm(&self, i: usize) -> f64 {
        let xi = self.xi(i);
        xi[0].hypot(xi[1])
    }

    pub fn contains(&self, k: [i64; 2]) -> bool {
        self.points.binary_search(&k).is_ok()
    }
}

/// Lattice points of `kind`, sorted lexicographically.
///
/// Fails on an empty mask, on a sector in one dimension, and on an annulus
/// whose outer radius reaches the aliasing radius.
pub fn build_mask(grid: SpectralGrid, kind: MaskKind) -> Result<FrequencyMask> {
    if grid.dim == 1 && matches!(kind, MaskKind::Sector { .. } | MaskKind::AnnulusSector { .. }) {
        return Err(Error::invalid("mask", "sector", "a two-dimensional grid"));
    }
    if let Some(outer) = kind.annulus_outer() {
        if outer >= grid.nyquist() {
            return Err(Error::precondition(format!(
                "annulus reaches |xi| = {outer}, beyond the aliasing radius pi N / P = {}",
                grid.nyquist()
            )));
        }
    }
    let mut points: Vec<[i64; 2]> = grid.points().filter(|&k| kind.contains(grid.xi(k), grid.dim)).collect();
    points.sort_unstable();
    if points.is_empty() {
        return Err(Error::precondition(format!("mask {kind:?} contains no lattice frequency")));
    }
    Ok(FrequencyMask { grid, kind, points })
}

/// Outcome of [`annulus_containment`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub epsilon: f64,
    /// Lattice points in the shell `| |xi|^gamma - lambda^gamma | <= eps lambda^(gamma - beta - 1)`.
    pub checked: usize,
    /// Shell points outside the annulus.
    pub violations: usize,
}

/// Largest `eps <= 1/4` with `eps 2^(|1-gamma|/gamma) / gamma <= delta`,
/// together with a lattice check that the corresponding shell of
/// `|xi|^gamma` lies inside the annulus `A_{beta, lambda}`.
pub fn annulus_containment(grid: SpectralGrid, gamma: f64, beta: f64, delta: f64, lambda: f64) -> Result<Containment> {
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", gamma, "a positive exponent"));
    }
    if !(lambda >= 1.0) {
        return Err(Error::invalid("lambda", lambda, "a frequency >= 1"));
    }
    let epsilon = (gamma * delta / 2f64.powf((1.0 - gamma).abs() / gamma)).min(0.25);
    let width = epsilon * lambda.powf(gamma - beta - 1.0);
    let target = lambda.powf(gamma);
    let annulus = MaskKind::Annulus { lambda, delta, beta };
    let (mut checked, mut violations) = (0, 0);
    for k in grid.points() {
        let xi = grid.xi(k);
        let r = xi[0].hypot(xi[1]);
        if (r.powf(gamma) - target).abs() <= width {
            checked += 1;
            if !annulus.contains(xi, grid.dim) {
                violations += 1;
            }
        }
    }
    Ok(Containment {
        epsilon,
        checked,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_of_infinite_radius_is_everything() {
        let g = SpectralGrid::new(2, 8, 1.0).unwrap();
        let m = build_mask(g, MaskKind::Ball { radius: f64::INFINITY }).unwrap();
        assert_eq!(m.rank(), 64);
    }

    #[test]
    fn annulus_matches_enumeration() {
        let g = SpectralGrid::new(2, 128, 2.0 * PI).unwrap();
        let m = build_mask(
            g,
            MaskKind::Annulus {
                lambda: 32.0,
                delta: 2.0,
                beta: 0.0,
            },
        )
        .unwrap();
        let mut count = 0;
        for a in -64i64..64 {
            for b in -64i64..64 {
                let r2 = a * a + b * b;
                if (900..=1156).contains(&r2) {
                    count += 1;
                }
            }
        }
        assert_eq!(m.rank(), count);
    }

    #[test]
    fn thin_off_lattice_annulus_is_empty() {
        let g = SpectralGrid::new(1, 64, 2.0 * PI).unwrap();
        let kind = MaskKind::Annulus {
            lambda: 10.5,
            delta: 0.1,
            beta: 0.0,
        };
        assert!(build_mask(g, kind).is_err());
    }

    #[test]
    fn aliasing_is_rejected() {
        let g = SpectralGrid::new(1, 64, 2.0 * PI).unwrap();
        let kind = MaskKind::Annulus {
            lambda: 31.0,
            delta: 1.0,
            beta: 0.0,
        };
        assert!(build_mask(g, kind).is_err());
    }

    #[test]
    fn containment_examples() {
        let g = SpectralGrid::new(2, 128, 2.0 * PI).unwrap();
        let c = annulus_containment(g, 1.0, 0.0, 0.1, 20.0).unwrap();
        assert!((c.epsilon - 0.1).abs() < 1e-15);
        assert_eq!(c.violations, 0);
        let c = annulus_containment(g, 2.0, 0.0, 0.5, 20.0).unwrap();
        assert_eq!(c.epsilon, 0.25);
        assert!(c.checked > 0 && c.violations == 0);
        let c = annulus_containment(g, 0.5, 0.0, 0.5, 20.0).unwrap();
        assert!((c.epsilon - 0.125).abs() < 1e-15);
        assert_eq!(c.violations, 0);
    }
}

//! Observation functions `a : R^d -> [0,1]` sampled on a periodic
//! fundamental domain.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft::FftNd;
use crate::{Error, Result};

/// A unit direction in the plane (or a sign on the line).
///
/// The unit vector is stored alongside the angle so that axis and rational
/// directions are represented exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    angle: f64,
    unit: [f64; 2],
}

impl Direction {
    pub fn from_angle(angle: f64) -> Self {
        let angle = angle.rem_euclid(TAU);
        let quarter = angle / FRAC_PI_2;
        let k = quarter.round();
        if (quarter - k).abs() < 1e-15 {
            let k = (k as i64).rem_euclid(4);
            let unit = match k {
                0 => [1.0, 0.0],
                1 => [0.0, 1.0],
                2 => [-1.0, 0.0],
                _ => [0.0, -1.0],
            };
            return Direction {
                angle: k as f64 * FRAC_PI_2,
                unit,
            };
        }
        Direction {
            angle,
            unit: [angle.cos(), angle.sin()],
        }
    }

    /// Normalises `(x, y)`. Panics on the zero vector.
    pub fn from_vector(x: f64, y: f64) -> Self {
        let norm = x.hypot(y);
        assert!(norm > 0.0, "direction from the zero vector");
        Direction {
            angle: y.atan2(x).rem_euclid(TAU),
            unit: [x / norm, y / norm],
        }
    }

    pub fn horizontal() -> Self {
        Direction::from_vector(1.0, 0.0)
    }

    pub fn vertical() -> Self {
        Direction::from_vector(0.0, 1.0)
    }

    /// Angle in `[0, 2 pi)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn unit(&self) -> [f64; 2] {
        self.unit
    }

    /// Counterclockwise normal `theta^perp`.
    pub fn normal(&self) -> [f64; 2] {
        [-self.unit[1], self.unit[0]]
    }

    /// Image of `(1, 0)` under the rotation that sends `(0, 1)` to this
    /// direction; the transverse coordinate of the comb profile.
    pub fn transverse(&self) -> [f64; 2] {
        [self.unit[1], -self.unit[0]]
    }

    /// Geodesic distance on the circle, in `[0, pi]`.
    pub fn distance(&self, other: &Direction) -> f64 {
        let d = (self.angle - other.angle).abs();
        d.min(TAU - d)
    }

    pub fn reversed(&self) -> Self {
        Direction::from_vector(-self.unit[0], -self.unit[1])
    }
}

/// Analytic descriptor of an observation field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Family {
    /// `a = value` everywhere.
    Constant { value: f64 },
    /// Indicator of `[0, delta]^d + Z^d`.
    PeriodicSquare { delta: f64 },
    /// Indicator of `E x F` with `E`, `F` given by intervals of one unit cell.
    Product { e: Vec<[f64; 2]>, f: Vec<[f64; 2]> },
    /// Indicator of the set avoiding both axes with power-law cusps.
    EBeta { beta: f64 },
    /// Left halves of the vertical integer strips on the upper half plane,
    /// right halves on the lower half plane.
    HalfStripComb,
    /// Samples supplied directly.
    CustomGrid { note: String },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "constant",
            Family::PeriodicSquare { .. } => "periodic-square",
            Family::Product { .. } => "product",
            Family::EBeta { .. } => "e-beta",
            Family::HalfStripComb => "half-strip-comb",
            Family::CustomGrid { .. } => "custom-grid",
        }
    }

    /// Families living on a truncation box rather than a period cell.
    pub fn is_box(&self) -> bool {
        matches!(self, Family::EBeta { .. } | Family::HalfStripComb)
    }

    pub fn is_indicator(&self) -> bool {
        !matches!(self, Family::Constant { .. } | Family::CustomGrid { .. })
    }

    /// Invariant under the integer lattice `Z^d`.
    pub fn is_lattice_periodic(&self) -> bool {
        matches!(
            self,
            Family::Constant { .. } | Family::PeriodicSquare { .. } | Family::Product { .. }
        )
    }

    /// Invariant (up to lattice translations) under the symmetry group of the
    /// square, so that direction `(P, Q)` behaves like `(|Q|, |P|)`.
    pub fn is_square_symmetric(&self) -> bool {
        match self {
            Family::Constant { .. } | Family::PeriodicSquare { .. } => true,
            Family::Product { e, f } => e == f && e.len() == 1,
            _ => false,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Family::Constant { value } => {
                if !(0.0..=1.0).contains(value) {
                    return Err(Error::invalid("value", value, "a constant in [0,1]"));
                }
            }
            Family::PeriodicSquare { delta } => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return Err(Error::invalid("delta", delta, "a square side in (0,1]"));
                }
            }
            Family::Product { e, f } => {
                if dim != 2 {
                    return Err(Error::invalid("dim", dim, "2 for the product family"));
                }
                for iv in e.iter().chain(f) {
                    if !(0.0 <= iv[0] && iv[0] < iv[1] && iv[1] <= 1.0) {
                        return Err(Error::invalid(
                            "interval",
                            format!("[{}, {}]", iv[0], iv[1]),
                            "intervals inside the unit cell [0,1]",
                        ));
                    }
                }
            }
            Family::EBeta { beta } => {
                if dim != 2 {
                    return Err(Error::invalid("dim", dim, "2 for the e-beta family"));
                }
                if !(*beta > 0.0 && *beta <= 1.0) {
                    return Err(Error::invalid("beta", beta, "a value in (0,1]"));
                }
            }
            Family::HalfStripComb => {
                if dim != 2 {
                    return Err(Error::invalid("dim", dim, "2 for the half-strip-comb family"));
                }
            }
            Family::CustomGrid { .. } => {}
        }
        Ok(())
    }

    /// Exact value at a point, for the analytic families.
    fn exact(&self, p: [f64; 2], dim: usize) -> Option<f64> {
        let inside = |t: f64, ivs: &[[f64; 2]]| {
            let t = t - t.floor();
            ivs.iter().any(|iv| iv[0] <= t && t <= iv[1])
        };
        let v = match self {
            Family::Constant { value } => *value,
            Family::PeriodicSquare { delta } => {
                let hit = |t: f64| t - t.floor() <= *delta;
                indicator(hit(p[0]) && (dim == 1 || hit(p[1])))
            }
            Family::Product { e, f } => indicator(inside(p[0], e) && inside(p[1], f)),
            Family::EBeta { beta } => {
                let q = (beta - 1.0) / (2.0 * beta);
                let (x, y) = (p[0].abs(), p[1].abs());
                indicator((x > 1.0 && y > x.powf(q)) || (x < 1.0 && y.powf(q) < x))
            }
            Family::HalfStripComb => {
                let t = p[0] - p[0].floor();
                indicator(if p[1] >= 0.0 { t < 0.5 } else { t >= 0.5 })
            }
            Family::CustomGrid { .. } => return None,
        };
        Some(v)
    }
}

/// Parameters `s in [0, length]` with `frac(p + s u)` in one of `ivs`
/// (sub-intervals of `[0, 1]`), as sorted disjoint intervals.
fn periodic_hits(p: f64, u: f64, length: f64, ivs: &[[f64; 2]]) -> Vec<[f64; 2]> {
    if u == 0.0 {
        let t = p - p.floor();
        let hit = ivs.iter().any(|iv| iv[0] <= t && t <= iv[1]);
        return if hit { vec![[0.0, length]] } else { Vec::new() };
    }
    let (a, b) = if u > 0.0 { (p, p + length * u) } else { (p + length * u, p) };
    let mut out = Vec::new();
    for k in (a.floor() as i64)..=(b.floor() as i64) {
        for iv in ivs {
            let lo = (k as f64 + iv[0]).max(a);
            let hi = (k as f64 + iv[1]).min(b);
            if hi > lo {
                let (s0, s1) = ((lo - p) / u, (hi - p) / u);
                let (s0, s1) = if u > 0.0 { (s0, s1) } else { (s1, s0) };
                out.push([s0.clamp(0.0, length), s1.clamp(0.0, length)]);
            }
        }
    }
    out.sort_by(|x, y| x[0].total_cmp(&y[0]));
    merge(out)
}

fn merge(sorted: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
            _ => out.push(iv),
        }
    }
    out
}

fn intersect(a: &[[f64; 2]], b: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i][0].max(b[j][0]);
        let hi = a[i][1].min(b[j][1]);
        if hi > lo {
            out.push([lo, hi]);
        }
        if a[i][1] < b[j][1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// A `[0,1]`-valued observation function on the periodic domain
/// `origin + [0, period)^d`, sampled on `n` points per axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservationField {
    dim: usize,
    period: f64,
    origin: f64,
    n: usize,
    #[serde(skip)]
    values: Vec<f64>,
    family: Family,
    modulus: f64,
}

impl ObservationField {
    /// Samples an analytic family. Lattice-periodic families need an integer
    /// period; box families are centred at the origin.
    pub fn from_family(dim: usize, family: Family, period: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid("dim", dim, "1 or 2"));
        }
        if n < 2 {
            return Err(Error::invalid("n", n, "at least 2 samples per axis"));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid("period", period, "a positive length"));
        }
        if let Family::CustomGrid { .. } = family {
            return Err(Error::invalid(
                "family",
                "custom-grid",
                "an analytic family (use from_grid for sampled data)",
            ));
        }
        family.validate(dim)?;
        if family.is_lattice_periodic() && period.fract() != 0.0 {
            return Err(Error::invalid("period", period, "an integer number of unit cells"));
        }
        if matches!(family, Family::HalfStripComb) && period.fract() != 0.0 {
            return Err(Error::invalid("period", period, "an integer box side"));
        }
        let origin = if family.is_box() { -period / 2.0 } else { 0.0 };
        let mut field = ObservationField {
            dim,
            period,
            origin,
            n,
            values: Vec::new(),
            family,
            modulus: 0.0,
        };
        field.values = (0..field.len())
            .map(|idx| {
                let p = field.node(idx);
                field.family.exact(p, dim).expect("analytic family")
            })
            .collect();
        Ok(field)
    }

    pub fn constant(dim: usize, period: f64, n: usize, value: f64) -> Result<Self> {
        Self::from_family(dim, Family::Constant { value }, period, n)
    }

    pub fn periodic_square(dim: usize, delta: f64, period: f64, n: usize) -> Result<Self> {
        Self::from_family(dim, Family::PeriodicSquare { delta }, period, n)
    }

    pub fn product(e: Vec<[f64; 2]>, f: Vec<[f64; 2]>, period: f64, n: usize) -> Result<Self> {
        Self::from_family(2, Family::Product { e, f }, period, n)
    }

    pub fn e_beta(beta: f64, box_side: f64, n: usize) -> Result<Self> {
        Self::from_family(2, Family::EBeta { beta }, box_side, n)
    }

    pub fn half_strip_comb(box_side: f64, n: usize) -> Result<Self> {
        Self::from_family(2, Family::HalfStripComb, box_side, n)
    }

    /// Wraps raw samples, row-major with the first axis slowest.
    pub fn from_grid(dim: usize, period: f64, origin: f64, n: usize, values: Vec<f64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid("dim", dim, "1 or 2"));
        }
        if values.len() != n.pow(dim as u32) {
            return Err(Error::invalid("values", values.len(), format!("n^d = {}", n.pow(dim as u32))));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid("sample", v, "values in [0,1]"));
        }
        Ok(ObservationField {
            dim,
            period,
            origin,
            n,
            values,
            family: Family::CustomGrid {
                note: "sampled data".into(),
            },
            modulus: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Mollification radius; zero for unmollified samples.
    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn is_box(&self) -> bool {
        self.family.is_box()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Coordinates of the grid node with flat index `idx`.
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        if self.dim == 1 {
            [self.origin + idx as f64 * h, 0.0]
        } else {
            let (i, j) = (idx / self.n, idx % self.n);
            [self.origin + i as f64 * h, self.origin + j as f64 * h]
        }
    }

    /// Value of `a` at `p` (the second coordinate is ignored for `d = 1`).
    ///
    /// Unmollified analytic families are evaluated exactly; everything else is
    /// interpolated (bilinearly in `d = 2`) from the samples with periodic
    /// wrap.
    pub fn value(&self, p: [f64; 2]) -> f64 {
        if self.modulus == 0.0 {
            let q = if self.family.is_box() { self.wrap(p) } else { p };
            if let Some(v) = self.family.exact(q, self.dim) {
                return v;
            }
        }
        self.interpolate(p)
    }

    /// Exact set `{s in [0, length] : a(start + s unit) = 1}` as sorted
    /// disjoint intervals, for unmollified families whose restriction to a
    /// line is a finite union of intervals. `None` means "sample instead".
    pub(crate) fn line_cover(&self, start: [f64; 2], unit: [f64; 2], length: f64) -> Option<Vec<[f64; 2]>> {
        if self.modulus != 0.0 {
            return None;
        }
        let (u0, u1) = if self.dim == 1 { (unit[0], 0.0) } else { (unit[0], unit[1]) };
        let whole = vec![[0.0, length]];
        match &self.family {
            Family::Constant { value } if *value == 1.0 => Some(whole),
            Family::Constant { value } if *value == 0.0 => Some(Vec::new()),
            Family::PeriodicSquare { delta } => {
                let ivs = [[0.0, *delta]];
                let xs = periodic_hits(start[0], u0, length, &ivs);
                if self.dim == 1 {
                    return Some(xs);
                }
                Some(intersect(&xs, &periodic_hits(start[1], u1, length, &ivs)))
            }
            Family::Product { e, f } => Some(intersect(
                &periodic_hits(start[0], u0, length, e),
                &periodic_hits(start[1], u1, length, f),
            )),
            Family::HalfStripComb => {
                let end = [start[0] + length * u0, start[1] + length * u1];
                let inside = |t: f64| self.origin <= t && t < self.origin + self.period;
                if !(inside(start[0]) && inside(start[1]) && inside(end[0]) && inside(end[1])) {
                    return None;
                }
                let upper = periodic_hits(start[0], u0, length, &[[0.0, 0.5]]);
                let lower = periodic_hits(start[0], u0, length, &[[0.5, 1.0]]);
                // split at the crossing of the x axis
                let cut = if u1 == 0.0 {
                    if start[1] >= 0.0 {
                        0.0
                    } else {
                        length
                    }
                } else {
                    (-start[1] / u1).clamp(0.0, length)
                };
                let (up, down) = if u1 > 0.0 || (u1 == 0.0 && start[1] >= 0.0) {
                    ([cut, length], [0.0, cut])
                } else {
                    ([0.0, cut], [cut, length])
                };
                let mut out = intersect(&upper, &[up]);
                out.extend(intersect(&lower, &[down]));
                out.retain(|iv| iv[1] > iv[0]);
                out.sort_by(|a, b| a[0].total_cmp(&b[0]));
                Some(merge(out))
            }
            _ => None,
        }
    }

    fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let w = |t: f64| {
            let s = t - self.origin;
            if (0.0..self.period).contains(&s) {
                t
            } else {
                self.origin + s.rem_euclid(self.period)
            }
        };
        [w(p[0]), w(p[1])]
    }

    /// Interpolated value from the samples.
    pub fn interpolate(&self, p: [f64; 2]) -> f64 {
        let h = self.spacing();
        let n = self.n as i64;
        let split = |t: f64| {
            let u = (t - self.origin) / h;
            let i = u.floor();
            (i as i64, u - i)
        };
        let (i, s) = split(p[0]);
        let i0 = i.rem_euclid(n) as usize;
        let i1 = (i + 1).rem_euclid(n) as usize;
        if self.dim == 1 {
            return (1.0 - s) * self.values[i0] + s * self.values[i1];
        }
        let (j, t) = split(p[1]);
        let j0 = j.rem_euclid(n) as usize;
        let j1 = (j + 1).rem_euclid(n) as usize;
        let m = self.n;
        let v00 = self.values[i0 * m + j0];
        let v01 = self.values[i0 * m + j1];
        let v10 = self.values[i1 * m + j0];
        let v11 = self.values[i1 * m + j1];
        (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11)
    }

    /// A Lipschitz constant of the interpolant in the Euclidean norm.
    pub fn lipschitz_bound(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for idx in 0..self.len() {
            if self.dim == 1 {
                worst = worst.max((self.values[(idx + 1) % n] - self.values[idx]).abs());
            } else {
                let (i, j) = (idx / n, idx % n);
                let v = self.values[idx];
                worst = worst.max((self.values[((i + 1) % n) * n + j] - v).abs());
                worst = worst.max((self.values[i * n + (j + 1) % n] - v).abs());
            }
        }
        (self.dim as f64).sqrt() * worst / self.spacing()
    }

    /// Averages the samples over discrete balls of radius `r`, producing a
    /// uniformly continuous field with modulus scale `r`.
    pub fn mollified(&self, r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", r, "a non-negative radius"));
        }
        if r == 0.0 {
            return Ok(self.clone());
        }
        let n = self.n;
        let h = self.spacing();
        let reach = (r / h).floor() as i64;
        let plan = FftNd::new(self.dim, n);
        let mut kernel = vec![Complex64::new(0.0, 0.0); self.len()];
        let mut count = 0.0;
        let wrap = |k: i64| k.rem_euclid(n as i64) as usize;
        for di in -reach..=reach {
            let djs = if self.dim == 1 { 0..=0 } else { -reach..=reach };
            for dj in djs {
                let d2 = ((di * di + dj * dj) as f64) * h * h;
                if d2 <= r * r * (1.0 + 1e-12) {
                    let idx = if self.dim == 1 { wrap(di) } else { wrap(di) * n + wrap(dj) };
                    kernel[idx].re += 1.0;
                    count += 1.0;
                }
            }
        }
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan.forward(&mut data);
        plan.forward(&mut kernel);
        for (d, k) in data.iter_mut().zip(&kernel) {
            *d *= k;
        }
        plan.inverse(&mut data);
        let scale = 1.0 / (count * self.len() as f64);
        let mut out = self.clone();
        out.values = data.iter().map(|c| (c.re * scale).clamp(0.0, 1.0)).collect();
        out.modulus = r;
        Ok(out)
    }

    /// Sets the samples with first coordinate in `[lo, hi)` to zero; the
    /// result is a sampled field.
    pub fn with_zeroed_window(&self, lo: f64, hi: f64) -> Self {
        let mut out = self.clone();
        for idx in 0..self.len() {
            let x = self.node(idx)[0];
            if lo <= x && x < hi {
                out.values[idx] = 0.0;
            }
        }
        out.family = Family::CustomGrid {
            note: format!("{} with zeroed window [{lo}, {hi})", self.family.label()),
        };
        out
    }

    /// Samples of the level set indicator `1_{a >= eps}`. Since
    /// `a <= 1_{a >= eps} + eps`, every window average drops by at most
    /// `eps`.
    pub fn level_set(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.values = self.values.iter().map(|&v| if v >= eps { 1.0 } else { 0.0 }).collect();
        out.family = Family::CustomGrid {
            note: format!("level set {{a >= {eps}}} of {}", self.family.label()),
        };
        out
    }

    /// The field `p -> a(R p)` with `R` the counterclockwise quarter turn;
    /// requires a domain symmetric under the turn (origin zero).
    pub fn rotated_quarter(&self) -> Result<Self> {
        if self.dim != 2 || self.origin != 0.0 {
            return Err(Error::precondition("quarter turns need a 2d field with origin 0"));
        }
        let n = self.n;
        let mut values = vec![0.0; self.len()];
        for i in 0..n {
            for j in 0..n {
                // a(R(x_i, y_j)) = a(-y_j, x_i)
                values[i * n + j] = self.values[((n - j) % n) * n + i];
            }
        }
        let mut out = self.clone();
        out.values = values;
        out.family = Family::CustomGrid {
            note: format!("{} turned by a quarter", self.family.label()),
        };
        Ok(out)
    }

    /// Writes the raw grid format: one ASCII header line followed by the
    /// samples as little-endian `f64`, row-major.
    pub fn write_grid(&self, path: &Path) -> Result<()> {
        let mut file = File::create(path)?;
        writeln!(
            file,
            "obslab-grid dim={} period={} n={} origin={}",
            self.dim, self.period, self.n, self.origin
        )?;
        for v in &self.values {
            file.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_grid(path: &Path) -> Result<Self> {
        let mut reader = BufReader::new(File::open(path)?);
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("obslab-grid") {
            return Err(Error::invalid("grid header", header.trim(), "`obslab-grid dim=.. period=.. n=.. origin=..`"));
        }
        let (mut dim, mut period, mut n, mut origin) = (None, None, None, 0.0);
        for kv in fields {
            let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
            let bad = || Error::invalid("grid header", kv.to_string(), "key=value");
            match k {
                "dim" => dim = Some(v.parse::<usize>().map_err(|_| bad())?),
                "period" => period = Some(v.parse::<f64>().map_err(|_| bad())?),
                "n" => n = Some(v.parse::<usize>().map_err(|_| bad())?),
                "origin" => origin = v.parse::<f64>().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        let (dim, period, n) = match (dim, period, n) {
            (Some(d), Some(p), Some(n)) => (d, p, n),
            _ => return Err(Error::invalid("grid header", header.trim(), "dim, period and n")),
        };
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        if bytes.len() % 8 != 0 {
            return Err(Error::invalid("grid body", bytes.len(), "a multiple of 8 bytes"));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Self::from_grid(dim, period, origin, n, values)
    }
}

/// Evaluates `field` at `x` (one coordinate per axis).
pub fn evaluate(field: &ObservationField, x: &[f64]) -> f64 {
    let p = [x[0], x.get(1).copied().unwrap_or(0.0)];
    field.value(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_axes_are_exact() {
        assert_eq!(Direction::from_angle(FRAC_PI_2).unit(), [0.0, 1.0]);
        assert_eq!(Direction::from_angle(TAU - 1e-17).unit(), [1.0, 0.0]);
        let d = Direction::from_vector(3.0, 4.0);
        assert!((d.unit()[0] - 0.6).abs() < 1e-15);
        assert!((Direction::from_angle(0.1).distance(&Direction::from_angle(TAU - 0.1)) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn half_strip_examples() {
        let f = ObservationField::half_strip_comb(32.0, 64).unwrap();
        assert_eq!(evaluate(&f, &[0.25, 5.0]), 1.0);
        assert_eq!(evaluate(&f, &[0.25, -5.0]), 0.0);
        assert_eq!(evaluate(&f, &[0.75, -5.0]), 1.0);
    }

    #[test]
    fn samples_in_unit_interval_and_indicator() {
        let f = ObservationField::periodic_square(2, 0.3, 1.0, 32).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0 || v == 1.0));
        let g = f.mollified(0.1).unwrap();
        assert!(g.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((g.mean() - f.mean()).abs() < 1e-12);
    }

    #[test]
    fn periodic_extension_agrees() {
        let f = ObservationField::periodic_square(2, 0.3, 2.0, 32)
            .unwrap()
            .mollified(0.2)
            .unwrap();
        for &(x, y) in &[(0.125, 0.25), (0.71875, 1.5), (1.0625, 0.0)] {
            let a = f.value([x, y]);
            assert_eq!(a, f.value([x + 2.0, y]));
            assert_eq!(a, f.value([x, y - 2.0]));
        }
    }

    #[test]
    fn interpolation_exact_at_nodes() {
        let f = ObservationField::periodic_square(2, 0.4, 1.0, 16)
            .unwrap()
            .mollified(0.15)
            .unwrap();
        for idx in [0, 17, 100, 255] {
            assert_eq!(f.value(f.node(idx)), f.values()[idx]);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ObservationField::periodic_square(2, 1.5, 1.0, 8).is_err());
        assert!(ObservationField::periodic_square(2, 0.5, 1.5, 8).is_err());
        assert!(ObservationField::e_beta(1.5, 10.0, 8).is_err());
        assert!(ObservationField::from_grid(1, 1.0, 0.0, 4, vec![0.0, 2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn quarter_turn_composes_to_identity() {
        let f = ObservationField::product(vec![[0.0, 0.3]], vec![[0.1, 0.9]], 1.0, 16).unwrap();
        let mut g = f.clone();
        for _ in 0..4 {
            g = g.rotated_quarter().unwrap();
        }
        assert_eq!(g.values(), f.values());
        let r = f.rotated_quarter().unwrap();
        // b(x, y) = a(-y, x)
        assert_eq!(r.value(r.node(3 * 16 + 5)), f.value([-(5.0 / 16.0), 3.0 / 16.0]));
    }
}

//! Comb densities `a_{theta,M}` and the one-dimensional relative density.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{Direction, ObservationField};
use crate::rational::lattice_direction;
use crate::{Error, Result};

/// Largest `max(|P|, |Q|)` for which a direction is treated as rational.
const MAX_LATTICE_DENOMINATOR: i64 = 10_000;

/// Resolution of a comb profile computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombSearch {
    /// Profile cells: per transverse period for rational directions on
    /// periodic fields, over the whole range otherwise.
    pub x_cells: usize,
    /// Samples per unit length along lines that cannot be integrated exactly.
    pub samples_per_unit: f64,
    /// Search extent for the window offset `t` when the lifted line is not
    /// periodic.
    pub extent: f64,
    /// Distance kept from the edge of the truncation box for box families.
    pub box_margin: f64,
}

impl Default for CombSearch {
    fn default() -> Self {
        CombSearch {
            x_cells: 64,
            samples_per_unit: 32.0,
            extent: 64.0,
            box_margin: 1.0,
        }
    }
}

/// Sampled `x -> a_{theta,M}(x)`, stored as a step function: `values[i]`
/// is the profile at the centre of the cell `origin + [i, i+1) spacing`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombProfile {
    pub theta: Direction,
    pub m: f64,
    pub origin: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
    /// The profile repeats with period `values.len() * spacing`.
    pub periodic: bool,
    /// Window infima computed exactly rather than from samples.
    pub exact: bool,
}

impl CombProfile {
    /// A one-dimensional field viewed as a profile: cell averages (exact for
    /// indicator families) on the field grid.
    pub fn from_field_1d(field: &ObservationField) -> Result<Self> {
        if field.dim() != 1 {
            return Err(Error::invalid("dim", field.dim(), "a 1d field"));
        }
        let h = field.spacing();
        let exact = field.line_cover([field.origin(), 0.0], [1.0, 0.0], h).is_some();
        let values = (0..field.n())
            .map(|i| {
                let x0 = field.origin() + i as f64 * h;
                match field.line_cover([x0, 0.0], [1.0, 0.0], h) {
                    Some(cover) => cover.iter().map(|iv| iv[1] - iv[0]).sum::<f64>() / h,
                    None => field.values()[i],
                }
            })
            .collect();
        Ok(CombProfile {
            theta: Direction::horizontal(),
            m: h,
            origin: field.origin(),
            spacing: h,
            values,
            periodic: true,
            exact,
        })
    }

    /// Wraps raw cell values.
    pub fn from_cells(origin: f64, spacing: f64, values: Vec<f64>, periodic: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("values", 0, "a non-empty profile"));
        }
        if !(spacing > 0.0) {
            return Err(Error::invalid("spacing", spacing, "a positive cell width"));
        }
        Ok(CombProfile {
            theta: Direction::vertical(),
            m: spacing,
            origin,
            spacing,
            values,
            periodic,
            exact: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length of the sampled range (one period if periodic).
    pub fn range(&self) -> f64 {
        self.spacing * self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Largest difference quotient between neighbouring cells.
    pub fn lipschitz_bound(&self) -> f64 {
        let n = self.values.len();
        let pairs = if self.periodic { n } else { n.saturating_sub(1) };
        (0..pairs)
            .map(|i| (self.values[(i + 1) % n] - self.values[i]).abs())
            .fold(0.0, f64::max)
            / self.spacing
    }

    /// Integral of the step function from `origin` to `origin + x`,
    /// periodically continued when the profile is periodic.
    fn cumulative(&self, prefix: &[f64], x: f64) -> f64 {
        let n = self.values.len();
        let total = prefix[n];
        let (reps, x) = if self.periodic {
            let p = self.range();
            let r = (x / p).floor();
            (r, x - r * p)
        } else {
            (0.0, x)
        };
        let u = (x / self.spacing).clamp(0.0, n as f64);
        let i = (u.floor() as usize).min(n - 1);
        let partial = prefix[i] + (u - i as f64) * self.values[i] * self.spacing;
        reps * total + partial.min(total)
    }
}

/// `inf_s L^{-1} int_s^{s+L} profile`, exact for the step function: the
/// window average is piecewise linear in `s`, so only anchors where `s` or
/// `s + L` meets a cell boundary need checking.
pub fn relative_density_1d(profile: &CombProfile, l: f64) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid("L", l, "a positive length"));
    }
    if profile.is_empty() {
        return Err(Error::invalid("profile", 0, "a non-empty profile"));
    }
    let n = profile.len();
    let range = profile.range();
    if !profile.periodic && l > range * (1.0 + 1e-12) {
        return Err(Error::precondition(format!(
            "window length {l} exceeds the profile range {range}"
        )));
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in &profile.values {
        prefix.push(prefix.last().unwrap() + v * profile.spacing);
    }
    let last = if profile.periodic { range } else { (range - l).max(0.0) };
    let mut anchors: Vec<f64> = Vec::with_capacity(2 * n + 2);
    for i in 0..=n {
        let b = i as f64 * profile.spacing;
        for s in [b, b - l] {
            let s = if profile.periodic { s.rem_euclid(range) } else { s };
            if (0.0..=last).contains(&s) {
                anchors.push(s);
            }
        }
    }
    anchors.push(0.0);
    anchors.push(last);
    let best = anchors
        .iter()
        .map(|&s| (profile.cumulative(&prefix, s + l) - profile.cumulative(&prefix, s)) / l)
        .fold(f64::INFINITY, f64::min);
    Ok(best.clamp(0.0, 1.0))
}

/// Minimum over `t` in `[0, total - m]` of the covered measure of
/// `[t, t + m]`, for sorted disjoint intervals in `[0, total]`.
fn exact_window_min(cover: &[[f64; 2]], total: f64, m: f64) -> f64 {
    let last = (total - m).max(0.0);
    let mut prefix = Vec::with_capacity(cover.len() + 1);
    prefix.push(0.0);
    for iv in cover {
        prefix.push(prefix.last().unwrap() + (iv[1] - iv[0]));
    }
    let measure_to = |x: f64| -> f64 {
        let k = cover.partition_point(|iv| iv[1] <= x);
        let mut v = prefix[k];
        if k < cover.len() && cover[k][0] < x {
            v += x - cover[k][0];
        }
        v
    };
    let mut best = f64::INFINITY;
    let mut check = |t: f64| {
        if (0.0..=last).contains(&t) {
            best = best.min(measure_to(t + m) - measure_to(t));
        }
    };
    check(0.0);
    check(last);
    for iv in cover {
        for b in iv {
            check(*b);
            check(b - m);
        }
    }
    best / m
}

fn sampled_window_min(field: &ObservationField, start: [f64; 2], u: [f64; 2], span: f64, m: f64, spu: f64) -> f64 {
    let k = ((m * spu).ceil() as usize).max(16);
    let h = m / k as f64;
    let windows = (span / h).floor() as usize + 1;
    let total = windows + k - 1;
    let mut prefix = Vec::with_capacity(total + 1);
    prefix.push(0.0);
    for j in 0..total {
        let s = (j as f64 + 0.5) * h;
        let v = field.value([start[0] + s * u[0], start[1] + s * u[1]]);
        prefix.push(prefix[j] + v);
    }
    (0..windows)
        .map(|i| (prefix[i + k] - prefix[i]) / k as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Window offsets `[t0, t1]` along the line at transverse coordinate `x`
/// keeping `[t, t + m]` inside the inner box, if any.
fn box_chord(lo: f64, hi: f64, e: [f64; 2], u: [f64; 2], x: f64, m: f64) -> Option<(f64, f64)> {
    let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..2 {
        let c = x * e[k];
        if u[k] == 0.0 {
            if c < lo || c > hi {
                return None;
            }
        } else {
            let (p, q) = ((lo - c) / u[k], (hi - c) / u[k]);
            a = a.max(p.min(q));
            b = b.min(p.max(q));
        }
    }
    (b - a >= m).then_some((a, b - m))
}

/// Computes `a_{theta,M}(x) = inf_t M^{-1} int_t^{t+M} a(x e + y theta) dy`
/// with `e` the transverse direction.
///
/// Rational directions on periodic fields give a profile periodic in `x`
/// with a periodic lifted line, so the infimum over `t` is taken over one
/// line period. For other directions on periodic fields the profile still
/// repeats in `x` (with period the larger transverse component of a lattice
/// basis vector) but `t` is only searched over the declared extent. Box
/// families restrict lines to the box minus the margin.
pub fn comb_profile(field: &ObservationField, theta: Direction, m: f64, search: &CombSearch) -> Result<CombProfile> {
    if field.dim() != 2 {
        return Err(Error::invalid("dim", field.dim(), "2 for comb profiles"));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid("M", m, "a positive window length"));
    }
    if search.x_cells == 0 {
        return Err(Error::invalid("x_cells", 0, "at least one profile cell"));
    }
    let e = theta.transverse();
    let u = theta.unit();
    let spu = search.samples_per_unit;

    // (origin, spacing, cells, periodic, offset range per cell)
    let (origin, spacing, ranges, periodic): (f64, f64, Vec<Option<(f64, f64)>>, bool) = if field.is_box() {
        let lo = field.origin() + search.box_margin;
        let hi = field.origin() + field.period() - search.box_margin;
        if lo >= hi {
            return Err(Error::precondition("box margin leaves no room"));
        }
        let proj: Vec<f64> = [[lo, lo], [lo, hi], [hi, lo], [hi, hi]]
            .iter()
            .map(|c| c[0] * e[0] + c[1] * e[1])
            .collect();
        let x_lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let x_hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let dx = (x_hi - x_lo) / search.x_cells as f64;
        let all: Vec<Option<(f64, f64)>> = (0..search.x_cells)
            .map(|i| box_chord(lo, hi, e, u, x_lo + (i as f64 + 0.5) * dx, m))
            .collect();
        let first = all.iter().position(Option::is_some);
        let last = all.iter().rposition(Option::is_some);
        let (Some(first), Some(last)) = (first, last) else {
            return Err(Error::precondition(format!(
                "no window of length {m} fits in the truncation box of side {}",
                field.period()
            )));
        };
        (x_lo + first as f64 * dx, dx, all[first..=last].to_vec(), false)
    } else {
        let cell = if field.family().is_lattice_periodic() { 1.0 } else { field.period() };
        match lattice_direction(u, MAX_LATTICE_DENOMINATOR) {
            Some((p, q)) => {
                let t = ((p * p + q * q) as f64).sqrt();
                let dx = cell / t / search.x_cells as f64;
                (0.0, dx, vec![Some((0.0, cell * t)); search.x_cells], true)
            }
            None => {
                // shifting by the lattice vector with the larger transverse
                // component maps lines to lines, so the profile repeats
                let period = cell * u[0].abs().max(u[1].abs());
                let dx = period / search.x_cells as f64;
                (0.0, dx, vec![Some((0.0, search.extent)); search.x_cells], true)
            }
        }
    };

    let results: Vec<(f64, bool)> = ranges
        .par_iter()
        .enumerate()
        .map(|(i, range)| {
            let x = origin + (i as f64 + 0.5) * spacing;
            let Some((t0, t1)) = *range else {
                // interior cell whose chord is too short: no window, no constraint
                return (f64::NAN, true);
            };
            let start = [x * e[0] + t0 * u[0], x * e[1] + t0 * u[1]];
            let span = t1 - t0;
            match field.line_cover(start, u, span + m) {
                Some(cover) => (exact_window_min(&cover, span + m, m), true),
                None => (sampled_window_min(field, start, u, span, m, spu), false),
            }
        })
        .collect();
    let exact = results.iter().all(|r| r.1);
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::precondition("truncation box chords too short for the window length"));
    }
    Ok(CombProfile {
        theta,
        m,
        origin,
        spacing,
        values: values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        periodic,
        exact,
    })
}

/// Outcome of a comb GCC check in one direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombCheck {
    pub eta: f64,
    pub pass: bool,
    pub floor: f64,
    pub profile_min: f64,
    pub exact: bool,
}

/// Checks the `(M, L, eta)` comb GCC in direction `theta`: `eta` is the
/// relative density of the comb profile at scale `L`, and the check passes
/// when `eta > floor`.
pub fn comb_gcc_check(
    field: &ObservationField,
    theta: Direction,
    m: f64,
    l: f64,
    search: &CombSearch,
    floor: f64,
) -> Result<CombCheck> {
    let profile = comb_profile(field, theta, m, search)?;
    let eta = relative_density_1d(&profile, l)?;
    Ok(CombCheck {
        eta,
        pass: eta > floor,
        floor,
        profile_min: profile.min(),
        exact: profile.exact,
    })
}

/// Infimum of segment averages over segments of length `l` pointing along
/// `theta` (the GCC restricted to one direction).
pub fn directional_gcc(field: &ObservationField, theta: Direction, l: f64, search: &CombSearch) -> Result<f64> {
    Ok(comb_profile(field, theta, l, search)?.min())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(delta: f64) -> ObservationField {
        ObservationField::periodic_square(2, delta, 1.0, 64).unwrap()
    }

    #[test]
    fn constant_profile_is_one() {
        let f = ObservationField::constant(2, 1.0, 8, 1.0).unwrap();
        let p = comb_profile(&f, Direction::from_angle(0.3), 2.0, &CombSearch::default()).unwrap();
        assert!(p.values.iter().all(|&v| v == 1.0));
        let c = comb_gcc_check(&f, Direction::vertical(), 1.0, 1.0, &CombSearch::default(), 1e-3).unwrap();
        assert_eq!((c.eta, c.pass), (1.0, true));
    }

    #[test]
    fn product_comb_is_the_product_of_densities() {
        let f = ObservationField::product(vec![[0.0, 0.6]], vec![[0.0, 0.6]], 1.0, 64).unwrap();
        let search = CombSearch {
            x_cells: 100,
            ..CombSearch::default()
        };
        let c = comb_gcc_check(&f, Direction::vertical(), 1.0, 1.0, &search, 1e-3).unwrap();
        assert!(c.exact);
        assert!((c.eta - 0.36).abs() < 1e-12, "{}", c.eta);
    }

    #[test]
    fn half_strip_vertical_profile_vanishes() {
        let f = ObservationField::half_strip_comb(32.0, 64).unwrap();
        let p = comb_profile(&f, Direction::vertical(), 4.0, &CombSearch::default()).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relative_density_of_step_functions() {
        let p = CombProfile::from_cells(0.0, 0.1, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0], true).unwrap();
        assert!((relative_density_1d(&p, 1.0).unwrap() - 0.6).abs() < 1e-12);
        assert!((relative_density_1d(&p, 0.5).unwrap() - 0.2).abs() < 1e-12);
        let z = CombProfile::from_cells(0.0, 0.5, vec![0.0; 4], false).unwrap();
        assert_eq!(relative_density_1d(&z, 1.0).unwrap(), 0.0);
        assert!(relative_density_1d(&z, 3.0).is_err());
    }

    #[test]
    fn one_dimensional_indicator_profile() {
        let f = ObservationField::periodic_square(1, 0.6, 4.0, 100).unwrap();
        let p = CombProfile::from_field_1d(&f).unwrap();
        assert!((relative_density_1d(&p, 1.0).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn directional_gcc_matches_the_square_bound() {
        // direction (2,5): segments of length T+2 see at least delta^2 T / 2
        let t = 29f64.sqrt();
        let d = Direction::from_vector(2.0, 5.0);
        let g = directional_gcc(&square(0.3), d, t + 2.0, &CombSearch::default()).unwrap();
        assert!(g >= 0.09 * t / 2.0 / (t + 2.0), "{g}");
    }

    #[test]
    fn sampled_and_exact_profiles_agree() {
        let f = square(0.4);
        let g = ObservationField::from_grid(2, 1.0, 0.0, 64, f.values().to_vec()).unwrap();
        let d = Direction::from_vector(1.0, 2.0);
        let search = CombSearch {
            samples_per_unit: 256.0,
            ..CombSearch::default()
        };
        let a = comb_profile(&f, d, 3.0, &search).unwrap();
        let b = comb_profile(&g, d, 3.0, &search).unwrap();
        assert!(a.exact && !b.exact);
        assert_eq!(a.values.len(), b.values.len());
        let diff = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 0.05, "{diff}");
    }
}

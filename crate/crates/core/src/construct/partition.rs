//! Ball systems, almost periodic density partitions and transfer functions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::ObservationField;
use crate::{Error, Result};

/// A function sampled at `origin + j * spacing`, `j = 0..values.len()`.
/// Integrals are left Riemann sums over the nodes, so that averages over
/// node-aligned intervals are exact finite sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub origin: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn zeros(origin: f64, spacing: f64, n: usize) -> Self {
        SampledFunction {
            origin,
            spacing,
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.spacing
    }

    /// Index of the node closest to `x`.
    pub fn index(&self, x: f64) -> usize {
        (((x - self.origin) / self.spacing).round().max(0.0) as usize).min(self.values.len().saturating_sub(1))
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    /// Mean over the nodes `lo..hi`.
    pub fn mean(&self, lo: usize, hi: usize) -> f64 {
        self.values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
    }

    /// Smallest mean over windows of `width` consecutive nodes inside
    /// `lo..hi`, with the index of the first minimising window.
    pub fn min_window_mean(&self, lo: usize, hi: usize, width: usize) -> Option<(usize, f64)> {
        if width == 0 || hi < lo + width {
            return None;
        }
        let mut sum: f64 = self.values[lo..lo + width].iter().sum();
        let mut best = (lo, sum);
        for start in lo + 1..=hi - width {
            sum += self.values[start + width - 1] - self.values[start - 1];
            if sum < best.1 {
                best = (start, sum);
            }
        }
        Some((best.0, best.1 / width as f64))
    }

    /// Views a `[0,1]`-valued function as a one-dimensional custom field
    /// whose period is the sampled range.
    pub fn to_field(&self) -> Result<ObservationField> {
        ObservationField::from_grid(
            1,
            self.spacing * self.values.len() as f64,
            self.origin,
            self.values.len(),
            self.values.clone(),
        )
    }
}

/// A disjoint union of open intervals `(c_j - delta, c_j + delta)` with
/// centres and radius aligned to a node grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSystem {
    pub centers: Vec<f64>,
    pub delta: f64,
}

impl BallSystem {
    pub fn new(mut centers: Vec<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::invalid("delta", delta, "a positive radius"));
        }
        centers.sort_by(f64::total_cmp);
        if let Some(w) = centers.windows(2).find(|w| w[1] - w[0] < 2.0 * delta * (1.0 - 1e-12)) {
            return Err(Error::invalid(
                "centers",
                format!("{} and {}", w[0], w[1]),
                format!("centres at least 2 delta = {} apart", 2.0 * delta),
            ));
        }
        Ok(BallSystem { centers, delta })
    }

    pub fn contains(&self, y: f64) -> bool {
        let k = self.centers.partition_point(|&c| c + self.delta <= y);
        k < self.centers.len() && (self.centers[k] - y).abs() < self.delta
    }

    /// Indicator on the nodes of `grid`, counting each ball as the
    /// half-open node range `[c - delta, c + delta)`.
    pub fn indicator(&self, grid: &SampledFunction) -> SampledFunction {
        let mut out = SampledFunction::zeros(grid.origin, grid.spacing, grid.len());
        let dn = (self.delta / grid.spacing).round() as i64;
        for &c in &self.centers {
            let ci = ((c - grid.origin) / grid.spacing).round() as i64;
            for j in (ci - dn).max(0)..(ci + dn).min(grid.len() as i64) {
                out.values[j as usize] = 1.0;
            }
        }
        out
    }

    /// Random grid-aligned system on `[lo, hi)` whose centre gaps are drawn
    /// uniformly from `[2 delta, 2 delta + spread]`; the spread is shrunk
    /// until the node indicator is `(m, rho)` relatively dense.
    pub fn random<R: Rng>(rng: &mut R, grid: &SampledFunction, m: f64, rho: f64, delta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid("rho", rho, "a density in (0,1)"));
        }
        let h = grid.spacing;
        let dn = (delta / h).round().max(1.0) as usize;
        let delta = dn as f64 * h;
        let mean_gap = 2.0 * delta / (rho + 0.5 * (1.0 - rho)).min(1.0);
        let mut spread = 2.0 * (mean_gap - 2.0 * delta);
        let width = (m / h).round() as usize;
        for _ in 0..200 {
            let spread_nodes = (spread / h).floor() as usize;
            let mut centers = Vec::new();
            let mut c = dn + rng.random_range(0..=spread_nodes);
            while c + dn <= grid.len() {
                centers.push(grid.node(c));
                c += 2 * dn + rng.random_range(0..=spread_nodes);
            }
            let sys = BallSystem::new(centers, delta)?;
            let ind = sys.indicator(grid);
            if let Some((_, v)) = ind.min_window_mean(0, grid.len(), width) {
                if v >= rho {
                    return Ok(sys);
                }
            }
            spread *= 0.9;
        }
        Err(Error::precondition(format!(
            "could not draw an (M, rho) = ({m}, {rho}) dense ball system with delta = {delta}"
        )))
    }
}

/// Breakpoints `s_k` (node indices and positions) with gap bounds and the
/// mean density of the function they were built for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodicPartition {
    pub breakpoints: Vec<f64>,
    /// Node indices of the breakpoints on the sampling grid.
    pub nodes: Vec<usize>,
    /// Mean density `rho` over the partitioned range.
    pub rho: f64,
    pub max_gap: f64,
    pub min_gap: f64,
}

impl AlmostPeriodicPartition {
    /// Partition from explicit breakpoint nodes of `b`; `rho` is the mean of
    /// `b` over the partitioned range.
    pub fn from_nodes(b: &SampledFunction, nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| w[1] <= w[0]) || *nodes.last().unwrap() > b.len() {
            return Err(Error::invalid("breakpoints", nodes.len(), "at least two increasing nodes on the grid"));
        }
        let gaps: Vec<f64> = nodes.windows(2).map(|w| (w[1] - w[0]) as f64 * b.spacing).collect();
        Ok(AlmostPeriodicPartition {
            breakpoints: nodes.iter().map(|&j| b.node(j)).collect(),
            rho: b.mean(nodes[0], *nodes.last().unwrap()),
            max_gap: gaps.iter().copied().fold(0.0, f64::max),
            min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
            nodes,
        })
    }

    /// Largest deviation of a cell mean of `b` from `rho`.
    pub fn cell_deviation(&self, b: &SampledFunction) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| (b.mean(w[0], w[1]) - self.rho).abs())
            .fold(0.0, f64::max)
    }
}

/// `s_0` is the first node at or after `0` outside `Y`, then `s_k` is the
/// first node outside `Y` at distance at least `M` from `s_{k-1}` (and
/// symmetrically for negative `k`); so
/// `M <= s_{k+1} - s_k <= M + 2 delta`.
pub fn build_partition(b: &SampledFunction, y: &BallSystem, m: f64) -> Result<AlmostPeriodicPartition> {
    if !(m > 0.0) {
        return Err(Error::invalid("M", m, "a positive length"));
    }
    if 2.0 * y.delta > m * (1.0 + 1e-12) {
        return Err(Error::invalid("delta", y.delta, format!("at most M/2 = {}", m / 2.0)));
    }
    let ind = y.indicator(b);
    let step = (m / b.spacing).round() as usize;
    let outside = |from: usize| (from..b.len()).find(|&j| ind.values[j] == 0.0);
    let outside_back = |to: usize| (0..=to).rev().find(|&j| ind.values[j] == 0.0);
    let zero = if b.origin > 0.0 { 0 } else { b.index(0.0) };
    let s0 = outside(zero)
        .or_else(|| outside_back(zero))
        .ok_or_else(|| Error::precondition("the ball system covers the whole interval"))?;
    let mut nodes = vec![s0];
    while let Some(j) = outside(nodes.last().unwrap() + step) {
        nodes.push(j);
    }
    let mut back = Vec::new();
    let mut cur = s0;
    while let Some(j) = cur.checked_sub(step).and_then(outside_back) {
        back.push(j);
        cur = j;
    }
    back.reverse();
    back.extend(nodes);
    let nodes = back;
    if nodes.len() < 2 {
        return Err(Error::precondition(format!(
            "working interval too short for one partition cell of length {m}"
        )));
    }
    AlmostPeriodicPartition::from_nodes(b, nodes)
}

/// Transfer function `B(y) = int_0^y (b - rho)` on the partitioned range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    /// `B` on the nodes `partition.nodes[0]..=last`.
    pub values: SampledFunction,
    pub max_abs: f64,
    /// `max |B(y) - B(s*)|` with `s*` the first breakpoint at or after `0`.
    pub max_from_anchor: f64,
    /// `max_k |B(s_k) - B(s_0)|`; zero up to rounding.
    pub breakpoint_spread: f64,
    /// The bound `4 M ||b||_inf`.
    pub bound: f64,
}

/// Integrates `b - rho` from the node closest to `0` (clamped into the
/// partitioned range). Fails if a cell mean differs from `rho` by more
/// than `1e-10`.
pub fn transfer_function(b: &SampledFunction, rho: f64, partition: &AlmostPeriodicPartition) -> Result<TransferFunction> {
    let (first, last) = (partition.nodes[0], *partition.nodes.last().unwrap());
    for w in partition.nodes.windows(2) {
        let avg = b.mean(w[0], w[1]);
        if (avg - rho).abs() > 1e-10 {
            return Err(Error::precondition(format!(
                "cell [{}, {}) has mean {avg}, not rho = {rho}",
                b.node(w[0]),
                b.node(w[1])
            )));
        }
    }
    let h = b.spacing;
    let mut cumulative = Vec::with_capacity(last - first + 1);
    cumulative.push(0.0);
    for j in first..last {
        cumulative.push(cumulative.last().unwrap() + (b.values[j] - rho) * h);
    }
    let zero = b.index(0.0).clamp(first, last);
    let shift = cumulative[zero - first];
    let values: Vec<f64> = cumulative.iter().map(|v| v - shift).collect();
    let star = partition
        .nodes
        .iter()
        .copied()
        .find(|&j| j >= zero)
        .unwrap_or(last);
    let b_star = values[star - first];
    let b0 = values[0];
    Ok(TransferFunction {
        max_abs: values.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
        max_from_anchor: values.iter().fold(0.0, |m, v| f64::max(m, (v - b_star).abs())),
        breakpoint_spread: partition
            .nodes
            .iter()
            .map(|&j| (values[j - first] - b0).abs())
            .fold(0.0, f64::max),
        bound: 4.0 * partition.max_gap * b.sup(),
        values: SampledFunction {
            origin: b.node(first),
            spacing: h,
            values,
        },
    })
}

/// Random almost periodic density function on `grid`: breakpoints with
/// gaps drawn from `[M/2, M]` (node aligned), values drawn from `[0, 1)`
/// and rescaled cell by cell to the mean `rho`.
pub fn random_density<R: Rng>(
    rng: &mut R,
    grid: &SampledFunction,
    m: f64,
    rho: f64,
) -> Result<(SampledFunction, AlmostPeriodicPartition)> {
    let step = (m / grid.spacing).round() as usize;
    if step < 2 || !(rho > 0.0) {
        return Err(Error::invalid("(M, rho)", format!("({m}, {rho})"), "M of at least two nodes and rho > 0"));
    }
    let mut nodes = vec![0];
    loop {
        let next = nodes.last().unwrap() + rng.random_range(step.div_ceil(2)..=step);
        if next > grid.len() {
            break;
        }
        nodes.push(next);
    }
    let mut b = SampledFunction::zeros(grid.origin, grid.spacing, grid.len());
    for w in nodes.windows(2) {
        let cell = &mut b.values[w[0]..w[1]];
        cell.iter_mut().for_each(|v| *v = rng.random::<f64>() + 1e-3);
        let scale = rho * cell.len() as f64 / cell.iter().sum::<f64>();
        cell.iter_mut().for_each(|v| *v *= scale);
    }
    let partition = AlmostPeriodicPartition::from_nodes(&b, nodes)?;
    Ok((b, partition))
}

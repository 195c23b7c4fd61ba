//! Grid sweeps over directions and anchors shared by the segment and
//! rectangle infima.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::field::{Direction, ObservationField};
use crate::{Error, Result};

/// Directions swept by an infimum search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionSet {
    /// `count` equally spaced angles starting at zero.
    Uniform(usize),
    /// `count` equally spaced angles in `[center - half_width, center + half_width]`.
    Arc {
        center: Direction,
        half_width: f64,
        count: usize,
    },
    /// An explicit list; no angular refinement.
    Fixed(Vec<Direction>),
}

impl DirectionSet {
    pub(crate) fn directions(&self, dim: usize) -> Vec<Direction> {
        if dim == 1 {
            return vec![Direction::horizontal()];
        }
        match self {
            DirectionSet::Uniform(count) => (0..*count)
                .map(|i| Direction::from_angle(TAU * i as f64 / *count as f64))
                .collect(),
            DirectionSet::Arc {
                center,
                half_width,
                count,
            } => {
                if *count == 1 {
                    return vec![*center];
                }
                (0..*count)
                    .map(|i| {
                        let s = -1.0 + 2.0 * i as f64 / (*count - 1) as f64;
                        Direction::from_angle(center.angle() + s * half_width)
                    })
                    .collect()
            }
            DirectionSet::Fixed(list) => list.clone(),
        }
    }

    /// Angular pitch used as the initial refinement step, or `None` when the
    /// direction is not refined.
    pub(crate) fn pitch(&self, dim: usize) -> Option<f64> {
        if dim == 1 {
            return None;
        }
        match self {
            DirectionSet::Uniform(count) => Some(TAU / *count as f64),
            DirectionSet::Arc {
                half_width, count, ..
            } if *count > 1 => Some(2.0 * half_width / (*count - 1) as f64),
            _ => None,
        }
    }

    /// Clamps an angle produced by refinement back into the swept set.
    pub(crate) fn admissible(&self, angle: f64) -> bool {
        match self {
            DirectionSet::Arc {
                center, half_width, ..
            } => Direction::from_angle(angle).distance(center) <= *half_width + 1e-15,
            _ => true,
        }
    }

    pub(crate) fn check(&self, min_count: usize) -> Result<()> {
        match self {
            DirectionSet::Uniform(count) if *count < min_count => Err(Error::invalid(
                "direction_grid_size",
                count,
                format!("at least {min_count}"),
            )),
            DirectionSet::Arc { count, .. } if *count == 0 => {
                Err(Error::invalid("direction_grid_size", count, "at least 1"))
            }
            DirectionSet::Fixed(list) if list.is_empty() => {
                Err(Error::invalid("directions", 0, "a non-empty list"))
            }
            _ => Ok(()),
        }
    }
}

/// Parameters of a grid-plus-descent infimum search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSearch {
    pub directions: DirectionSet,
    /// Anchor grid size per axis.
    pub anchors: usize,
    /// Quadrature samples per unit length (at least 16 per segment side).
    pub samples_per_unit: f64,
    /// Distance kept from the edge of the truncation box for box families.
    pub box_margin: f64,
    /// Run one round of coordinate descent around the grid minimiser.
    pub refine: bool,
}

impl SegmentSearch {
    pub fn new(direction_grid_size: usize, anchor_grid_size: usize) -> Self {
        SegmentSearch {
            directions: DirectionSet::Uniform(direction_grid_size),
            anchors: anchor_grid_size,
            samples_per_unit: 16.0,
            box_margin: 1.0,
            refine: true,
        }
    }

    pub fn with_directions(mut self, directions: DirectionSet) -> Self {
        self.directions = directions;
        self
    }

    pub fn with_samples_per_unit(mut self, spu: f64) -> Self {
        self.samples_per_unit = spu;
        self
    }

    pub fn with_refine(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub(crate) fn samples(&self, length: f64) -> usize {
        ((length * self.samples_per_unit).ceil() as usize).max(16)
    }
}

/// Admissible anchor region for a shape whose points are `anchor + offset`
/// with offsets in the bounding box `[min_off, max_off]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AnchorRegion {
    lo: [f64; 2],
    hi: [f64; 2],
    periodic: bool,
}

impl AnchorRegion {
    pub(crate) fn new(
        field: &ObservationField,
        min_off: [f64; 2],
        max_off: [f64; 2],
        margin: f64,
    ) -> Result<Self> {
        if !field.is_box() {
            let lo = [field.origin(); 2];
            let hi = [field.origin() + field.period(); 2];
            return Ok(AnchorRegion {
                lo,
                hi,
                periodic: true,
            });
        }
        let inner_lo = field.origin() + margin;
        let inner_hi = field.origin() + field.period() - margin;
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for k in 0..field.dim() {
            lo[k] = inner_lo - min_off[k];
            hi[k] = inner_hi - max_off[k];
            if lo[k] > hi[k] {
                return Err(Error::precondition(format!(
                    "shape of extent {:.3} does not fit in the truncation box of side {} with margin {}",
                    max_off[k] - min_off[k],
                    field.period(),
                    margin
                )));
            }
        }
        Ok(AnchorRegion {
            lo,
            hi,
            periodic: false,
        })
    }

    /// Grid of `count^d` anchors; periodic domains use a half-open grid.
    pub(crate) fn grid(&self, count: usize, dim: usize) -> Vec<[f64; 2]> {
        let axis = |k: usize| -> Vec<f64> {
            if self.periodic {
                let step = (self.hi[k] - self.lo[k]) / count as f64;
                (0..count).map(|i| self.lo[k] + i as f64 * step).collect()
            } else if count == 1 || self.hi[k] == self.lo[k] {
                vec![0.5 * (self.lo[k] + self.hi[k])]
            } else {
                let step = (self.hi[k] - self.lo[k]) / (count - 1) as f64;
                (0..count).map(|i| self.lo[k] + i as f64 * step).collect()
            }
        };
        let xs = axis(0);
        if dim == 1 {
            return xs.into_iter().map(|x| [x, 0.0]).collect();
        }
        let ys = axis(1);
        xs.iter()
            .flat_map(|&x| ys.iter().map(move |&y| [x, y]))
            .collect()
    }

    pub(crate) fn pitch(&self, count: usize, k: usize) -> f64 {
        let width = self.hi[k] - self.lo[k];
        if self.periodic {
            width / count as f64
        } else if count > 1 {
            width / (count - 1) as f64
        } else {
            0.0
        }
    }

    pub(crate) fn contains(&self, p: [f64; 2], dim: usize) -> bool {
        self.periodic || (0..dim).all(|k| self.lo[k] <= p[k] && p[k] <= self.hi[k])
    }
}

/// Coordinate descent on `(angle, x, y)`: each coordinate is moved by
/// `+-step` while that lowers the objective, then all steps are halved.
/// `objective` returns `None` for infeasible points.
pub(crate) fn coordinate_descent<F>(objective: F, start: [f64; 3], value: f64, steps: [f64; 3]) -> ([f64; 3], f64)
where
    F: Fn(&[f64; 3]) -> Option<f64>,
{
    let mut best = start;
    let mut best_value = value;
    let mut steps = steps;
    for _ in 0..8 {
        let mut improved = true;
        let mut rounds = 0;
        while improved && rounds < 16 {
            improved = false;
            rounds += 1;
            for k in 0..3 {
                if steps[k] == 0.0 {
                    continue;
                }
                for sign in [-1.0, 1.0] {
                    let mut trial = best;
                    trial[k] += sign * steps[k];
                    if let Some(v) = objective(&trial) {
                        if v < best_value {
                            best = trial;
                            best_value = v;
                            improved = true;
                        }
                    }
                }
            }
        }
        steps.iter_mut().for_each(|s| *s *= 0.5);
    }
    (best, best_value)
}

/// Index and value of the smallest entry; ties go to the smallest index.
pub(crate) fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

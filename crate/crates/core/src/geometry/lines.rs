//! Segment averages and the geometric control constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{Direction, ObservationField};
use super::search::{argmin, coordinate_descent, AnchorRegion, SegmentSearch};
use crate::{Error, Result};

/// The segment `start + s * direction`, `0 <= s <= length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub start: [f64; 2],
    pub direction: Direction,
    pub length: f64,
}

impl LineSegment {
    pub fn new(start: [f64; 2], direction: Direction, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("length", length, "a positive segment length"));
        }
        Ok(LineSegment {
            start,
            direction,
            length,
        })
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        let u = self.direction.unit();
        [self.start[0] + s * u[0], self.start[1] + s * u[1]]
    }
}

/// `|l|^{-1} int_l a`: exact for unmollified indicator families whose
/// restriction to a line is a finite union of intervals, midpoint rule with
/// `n_samples` points otherwise.
pub fn line_average(field: &ObservationField, segment: &LineSegment, n_samples: usize) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", n_samples, "at least 2"));
    }
    if !(segment.length > 0.0) {
        return Err(Error::invalid("length", segment.length, "a positive segment length"));
    }
    Ok(segment_mean(field, segment.start, segment.direction.unit(), segment.length, n_samples))
}

pub(crate) fn segment_mean(field: &ObservationField, start: [f64; 2], unit: [f64; 2], length: f64, n: usize) -> f64 {
    if let Some(cover) = field.line_cover(start, unit, length) {
        return cover.iter().map(|iv| iv[1] - iv[0]).sum::<f64>() / length;
    }
    let h = length / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let s = (i as f64 + 0.5) * h;
        sum += field.value([start[0] + s * unit[0], start[1] + s * unit[1]]);
    }
    sum / n as f64
}

/// Result of a segment infimum search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GccEstimate {
    /// Smallest average found; an upper bound for the true infimum.
    pub value: f64,
    pub argmin: LineSegment,
    /// Number of grid segments evaluated (refinement excluded).
    pub segments: usize,
    pub search: SegmentSearch,
}

fn segment_offsets(unit: [f64; 2], length: f64) -> ([f64; 2], [f64; 2]) {
    let end = [unit[0] * length, unit[1] * length];
    ([end[0].min(0.0), end[1].min(0.0)], [end[0].max(0.0), end[1].max(0.0)])
}

/// Estimates `inf_l |l|^{-1} int_l a` over segments of length exactly `l`:
/// grid over directions and anchors, then coordinate descent around the grid
/// minimiser.
pub fn gcc_constant(field: &ObservationField, l: f64, search: &SegmentSearch) -> Result<GccEstimate> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid("L", l, "a positive length"));
    }
    search.directions.check(8)?;
    if search.anchors < 8 {
        return Err(Error::invalid("anchor_grid_size", search.anchors, "at least 8"));
    }
    let dim = field.dim();
    let n = search.samples(l);
    let directions = search.directions.directions(dim);

    let per_direction: Vec<(f64, usize, usize)> = directions
        .par_iter()
        .map(|dir| -> Result<(f64, usize, usize)> {
            let unit = dir.unit();
            let (lo, hi) = segment_offsets(unit, l);
            let region = AnchorRegion::new(field, lo, hi, search.box_margin)?;
            let anchors = region.grid(search.anchors, dim);
            let values: Vec<f64> = anchors
                .iter()
                .map(|&z| segment_mean(field, z, unit, l, n))
                .collect();
            let (k, v) = argmin(&values).expect("non-empty anchor grid");
            Ok((v, k, anchors.len()))
        })
        .collect::<Result<_>>()?;

    let mins: Vec<f64> = per_direction.iter().map(|t| t.0).collect();
    let (di, value) = argmin(&mins).expect("non-empty direction grid");
    let segments = per_direction.iter().map(|t| t.2).sum();
    let dir = directions[di];
    let (lo, hi) = segment_offsets(dir.unit(), l);
    let region = AnchorRegion::new(field, lo, hi, search.box_margin)?;
    let start = region.grid(search.anchors, dim)[per_direction[di].1];
    let mut best = LineSegment::new(start, dir, l)?;
    let mut best_value = value;

    if search.refine {
        let angle_step = search.directions.pitch(dim).map_or(0.0, |p| 0.5 * p);
        let steps = [
            angle_step,
            0.5 * region.pitch(search.anchors, 0),
            if dim == 2 { 0.5 * region.pitch(search.anchors, 1) } else { 0.0 },
        ];
        let objective = |x: &[f64; 3]| -> Option<f64> {
            if !search.directions.admissible(x[0]) {
                return None;
            }
            let d = if angle_step > 0.0 { Direction::from_angle(x[0]) } else { dir };
            let (lo, hi) = segment_offsets(d.unit(), l);
            let region = AnchorRegion::new(field, lo, hi, search.box_margin).ok()?;
            let z = [x[1], x[2]];
            region
                .contains(z, dim)
                .then(|| segment_mean(field, z, d.unit(), l, n))
        };
        let (x, v) = coordinate_descent(objective, [dir.angle(), start[0], start[1]], value, steps);
        if v < best_value {
            let d = if angle_step > 0.0 { Direction::from_angle(x[0]) } else { dir };
            best = LineSegment::new([x[1], x[2]], d, l)?;
            best_value = v;
        }
    }

    Ok(GccEstimate {
        value: best_value,
        argmin: best,
        segments,
        search: search.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_has_unit_average() {
        let f = ObservationField::constant(2, 1.0, 8, 1.0).unwrap();
        let seg = LineSegment::new([0.3, 0.1], Direction::from_angle(0.7), 3.0).unwrap();
        assert_eq!(line_average(&f, &seg, 10).unwrap(), 1.0);
        let est = gcc_constant(&f, 5.0, &SegmentSearch::new(8, 8)).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(LineSegment::new([0.0, 0.0], Direction::horizontal(), 0.0).is_err());
        let f = ObservationField::constant(2, 1.0, 8, 1.0).unwrap();
        let seg = LineSegment::new([0.0, 0.0], Direction::horizontal(), 1.0).unwrap();
        assert!(line_average(&f, &seg, 1).is_err());
        assert!(gcc_constant(&f, 1.0, &SegmentSearch::new(4, 8)).is_err());
    }

    #[test]
    fn e_beta_axis_average_vanishes() {
        let f = ObservationField::e_beta(0.5, 40.0, 64).unwrap();
        let seg = LineSegment::new([2.0, 0.0], Direction::horizontal(), 10.0).unwrap();
        assert_eq!(line_average(&f, &seg, 1000).unwrap(), 0.0);
    }

    #[test]
    fn half_strip_vertical_gcc_vanishes() {
        let f = ObservationField::half_strip_comb(32.0, 64).unwrap();
        let search = SegmentSearch::new(8, 16).with_directions(crate::geometry::DirectionSet::Fixed(vec![Direction::vertical()]));
        let est = gcc_constant(&f, 6.0, &search).unwrap();
        assert_eq!(est.value, 0.0);
    }
}

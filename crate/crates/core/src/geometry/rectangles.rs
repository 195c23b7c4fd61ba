//! Anisotropic rectangles and the lower `(beta, L)` density.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{Direction, ObservationField};
use super::search::{argmin, coordinate_descent, AnchorRegion, SegmentSearch};
use crate::{Error, Result};

/// A member of the rectangle family: the image of `[0, L]^d` under the
/// dilation `D_{s,t}` with `s = lambda^{(beta-1)/2}`, `t = lambda^beta`,
/// rotated so that the long side points along `theta` and translated to
/// `anchor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleSpec {
    pub theta: Direction,
    pub anchor: [f64; 2],
    pub l: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl RectangleSpec {
    pub fn new(theta: Direction, anchor: [f64; 2], l: f64, lambda: f64, beta: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::invalid("L", l, "a positive length"));
        }
        if !(lambda >= 1.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", lambda, "a scale >= 1"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid("beta", beta, "a value in [0,1]"));
        }
        Ok(RectangleSpec {
            theta,
            anchor,
            l,
            lambda,
            beta,
        })
    }

    /// Side along the `d - 1` transverse axes, `L lambda^{(beta-1)/2}`.
    pub fn short_side(&self) -> f64 {
        self.l * self.lambda.powf(0.5 * (self.beta - 1.0))
    }

    /// Side along `theta`, `L lambda^beta`.
    pub fn long_side(&self) -> f64 {
        self.l * self.lambda.powf(self.beta)
    }

    pub fn area(&self, dim: usize) -> f64 {
        self.long_side() * if dim == 2 { self.short_side() } else { 1.0 }
    }

    fn offsets(theta: Direction, s: f64, t: f64, dim: usize) -> ([f64; 2], [f64; 2]) {
        let u = theta.unit();
        let nrm = if dim == 2 { theta.normal() } else { [0.0, 0.0] };
        let corners = [
            [0.0, 0.0],
            [s * nrm[0], s * nrm[1]],
            [t * u[0], t * u[1]],
            [s * nrm[0] + t * u[0], s * nrm[1] + t * u[1]],
        ];
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in corners {
            for k in 0..2 {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        (lo, hi)
    }
}

fn rect_mean(field: &ObservationField, anchor: [f64; 2], theta: Direction, s: f64, t: f64, spu: f64) -> f64 {
    let dim = field.dim();
    let u = theta.unit();
    let nrm = theta.normal();
    let nt = ((t * spu).ceil() as usize).max(8);
    let ns = if dim == 2 { ((s * spu).ceil() as usize).max(8) } else { 1 };
    let (ht, hs) = (t / nt as f64, s / ns as f64);
    let mut sum = 0.0;
    for i in 0..ns {
        let a = if dim == 2 { (i as f64 + 0.5) * hs } else { 0.0 };
        let base = [anchor[0] + a * nrm[0], anchor[1] + a * nrm[1]];
        let mut row = 0.0;
        for j in 0..nt {
            let b = (j as f64 + 0.5) * ht;
            row += field.value([base[0] + b * u[0], base[1] + b * u[1]]);
        }
        sum += row;
    }
    sum / (ns * nt) as f64
}

/// Midpoint-grid estimate of `|R|^{-1} int_R a` with `samples_per_unit`
/// points per unit length along each side (at least 8).
pub fn rectangle_density(field: &ObservationField, rect: &RectangleSpec, samples_per_unit: f64) -> f64 {
    rect_mean(
        field,
        rect.anchor,
        rect.theta,
        rect.short_side(),
        rect.long_side(),
        samples_per_unit,
    )
}

/// Result of the rectangle sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleEstimate {
    pub value: f64,
    pub argmin: RectangleSpec,
    /// Number of grid rectangles evaluated (refinement excluded).
    pub rectangles: usize,
    pub lambdas: Vec<f64>,
    pub search: SegmentSearch,
}

/// Sweeps rectangles over the `lambda` list, the direction grid and the
/// anchor grid, then refines the minimiser by coordinate descent.
pub fn rectangle_density_inf(
    field: &ObservationField,
    beta: f64,
    l: f64,
    lambdas: &[f64],
    search: &SegmentSearch,
) -> Result<RectangleEstimate> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda_list", "[]", "a non-empty list"));
    }
    search.directions.check(8)?;
    let dim = field.dim();
    let directions = search.directions.directions(dim);
    let mut cases = Vec::new();
    for &lambda in lambdas {
        for &dir in &directions {
            cases.push(RectangleSpec::new(dir, [0.0, 0.0], l, lambda, beta)?);
        }
    }
    let spu = search.samples_per_unit;
    let swept: Vec<(f64, RectangleSpec, usize)> = cases
        .par_iter()
        .map(|proto| -> Result<(f64, RectangleSpec, usize)> {
            let (s, t) = (proto.short_side(), proto.long_side());
            let (lo, hi) = RectangleSpec::offsets(proto.theta, s, t, dim);
            let region = AnchorRegion::new(field, lo, hi, search.box_margin)?;
            let anchors = region.grid(search.anchors, dim);
            let values: Vec<f64> = anchors
                .iter()
                .map(|&z| rect_mean(field, z, proto.theta, s, t, spu))
                .collect();
            let (k, v) = argmin(&values).expect("non-empty anchor grid");
            Ok((v, RectangleSpec { anchor: anchors[k], ..*proto }, anchors.len()))
        })
        .collect::<Result<_>>()?;
    let mins: Vec<f64> = swept.iter().map(|t| t.0).collect();
    let (ci, mut value) = argmin(&mins).expect("non-empty sweep");
    let mut best = swept[ci].1;
    let rectangles = swept.iter().map(|t| t.2).sum();

    if search.refine {
        let (s, t) = (best.short_side(), best.long_side());
        let (lo, hi) = RectangleSpec::offsets(best.theta, s, t, dim);
        let region = AnchorRegion::new(field, lo, hi, search.box_margin)?;
        let angle_step = search.directions.pitch(dim).map_or(0.0, |p| 0.5 * p);
        let steps = [
            angle_step,
            0.5 * region.pitch(search.anchors, 0),
            if dim == 2 { 0.5 * region.pitch(search.anchors, 1) } else { 0.0 },
        ];
        let theta0 = best.theta;
        let objective = |x: &[f64; 3]| -> Option<f64> {
            if !search.directions.admissible(x[0]) {
                return None;
            }
            let d = if angle_step > 0.0 { Direction::from_angle(x[0]) } else { theta0 };
            let (lo, hi) = RectangleSpec::offsets(d, s, t, dim);
            let region = AnchorRegion::new(field, lo, hi, search.box_margin).ok()?;
            let z = [x[1], x[2]];
            region.contains(z, dim).then(|| rect_mean(field, z, d, s, t, spu))
        };
        let start = [theta0.angle(), best.anchor[0], best.anchor[1]];
        let (x, v) = coordinate_descent(objective, start, value, steps);
        if v < value {
            value = v;
            best.theta = if angle_step > 0.0 { Direction::from_angle(x[0]) } else { theta0 };
            best.anchor = [x[1], x[2]];
        }
    }

    Ok(RectangleEstimate {
        value,
        argmin: best,
        rectangles,
        lambdas: lambdas.to_vec(),
        search: search.clone(),
    })
}

//! Uncertainty and resolvent constants.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mask::{build_mask, FrequencyMask, MaskKind, SpectralGrid};
use super::operator::{dense_extreme, Compression, EigenOptions, Extreme};
use crate::geometry::ObservationField;
use crate::{Error, Result};

/// Weight of the observation in the uncertainty principle: `a^(1/2) u`
/// observes with `w = a`, `a u` with `w = a^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    Sqrt,
    Full,
}

/// Quantity a [`SpectralReport`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantKind {
    UncertaintySqrt,
    UncertaintyFull,
    ResolventM,
}

/// One spectral constant with its provenance on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub kind: ConstantKind,
    pub field: String,
    pub grid: SpectralGrid,
    pub mask: MaskKind,
    pub rank: usize,
    /// Extreme eigenvalue: `c` for uncertainty constants, the largest
    /// generalised eigenvalue for resolvent constants.
    pub eigenvalue: f64,
    /// `C = c^(-1/2)` or `M`; infinite when the estimate fails.
    pub value: f64,
    pub residual: f64,
    pub solver: String,
    /// Kernel dimension removed before a resolvent eigensolve.
    pub deflated: usize,
}

fn check_grid(field: &ObservationField, grid: &SpectralGrid) -> Result<()> {
    if SpectralGrid::of_field(field)? != *grid {
        return Err(Error::precondition(format!(
            "mask grid {grid:?} differs from the field grid (dim {}, N {}, P {})",
            field.dim(),
            field.n(),
            field.period()
        )));
    }
    Ok(())
}

/// `c` = smallest eigenvalue of the compression of `w` to the mask and
/// `C = c^(-1/2)`, infinite when `c` does not exceed the residual floor.
pub fn uncertainty_constant(
    field: &ObservationField,
    mask: &FrequencyMask,
    weight: Weight,
    options: &EigenOptions,
) -> Result<SpectralReport> {
    check_grid(field, &mask.grid)?;
    let w: Vec<f64> = match weight {
        Weight::Sqrt => field.values().to_vec(),
        Weight::Full => field.values().iter().map(|v| v * v).collect(),
    };
    let op = Compression::new(mask, w)?;
    let pair = op.extreme(Extreme::Smallest, options)?;
    let floor = options.tol.max(pair.residual);
    let c = pair.value;
    Ok(SpectralReport {
        kind: match weight {
            Weight::Sqrt => ConstantKind::UncertaintySqrt,
            Weight::Full => ConstantKind::UncertaintyFull,
        },
        field: field.family().label().into(),
        grid: mask.grid,
        mask: mask.kind.clone(),
        rank: mask.rank(),
        eigenvalue: c,
        value: if c > floor { c.powf(-0.5) } else { f64::INFINITY },
        residual: pair.residual,
        solver: pair.solver.into(),
        deflated: 0,
    })
}

/// Smallest `M` with `|u|^2 <= M |(A - lambda) u|^2 + m <a u, u>` on the
/// frequencies `|xi| <= cutoff`, `A = |xi|^gamma`.
///
/// With `H = I - m G_a` and `D = diag(|xi|^gamma - lambda)`, `M` is the
/// largest eigenvalue of `D^-1 H D^-1` (or `0`). Frequencies where `D`
/// vanishes are deflated through the Schur complement of `H` on them; if
/// `H` is positive somewhere on that kernel no finite `M` exists.
pub fn resolvent_constant(
    field: &ObservationField,
    cutoff: f64,
    gamma: f64,
    lambda: f64,
    m: f64,
    options: &EigenOptions,
) -> Result<SpectralReport> {
    if !(m > 0.0) {
        return Err(Error::invalid("m", m, "a positive observation weight"));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", gamma, "a positive exponent"));
    }
    let grid = SpectralGrid::of_field(field)?;
    if !(cutoff < grid.nyquist()) {
        return Err(Error::invalid(
            "cutoff",
            cutoff,
            format!("below the aliasing radius pi N / P = {}", grid.nyquist()),
        ));
    }
    let mask = build_mask(grid, MaskKind::Ball { radius: cutoff })?;
    let op = Compression::new(&mask, field.values().to_vec())?;
    let n = mask.rank();
    let g = op.dense();
    let h = DMatrix::<Complex64>::identity(n, n) - g * Complex64::new(m, 0.0);
    let d: Vec<f64> = (0..n).map(|i| mask.norm(i).powf(gamma) - lambda).collect();
    let tol = 1e-9 * lambda.abs().max(1.0);
    let (kernel, range): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| d[i].abs() <= tol);
    let report = |eigenvalue: f64, value: f64, residual: f64, solver: &str| SpectralReport {
        kind: ConstantKind::ResolventM,
        field: field.family().label().into(),
        grid,
        mask: mask.kind.clone(),
        rank: n,
        eigenvalue,
        value,
        residual,
        solver: solver.into(),
        deflated: kernel.len(),
    };
    let sub = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| h[(rows[i], cols[j])]);
    let schur = if kernel.is_empty() {
        sub(&range, &range)
    } else {
        let hkk = sub(&kernel, &kernel);
        let top = dense_extreme(hkk.clone(), Extreme::Largest, options)?;
        if top.value > tol {
            return Ok(report(top.value, f64::INFINITY, top.residual, "dense"));
        }
        let neg = -hkk;
        let chol = neg.cholesky().ok_or_else(|| Error::Numerical {
            what: "resolvent pencil is singular on the kernel of A - lambda".into(),
            residual: top.value.abs(),
        })?;
        let hkr = sub(&kernel, &range);
        let hrk = sub(&range, &kernel);
        sub(&range, &range) + hrk * chol.solve(&hkr)
    };
    if range.is_empty() {
        return Ok(report(0.0, 0.0, 0.0, "dense"));
    }
    let scaled = DMatrix::from_fn(range.len(), range.len(), |i, j| {
        schur[(i, j)] / (d[range[i]] * d[range[j]])
    });
    let pair = dense_extreme(scaled, Extreme::Largest, options)?;
    Ok(report(pair.value, pair.value.max(0.0), pair.residual, pair.solver))
}

/// `m = 2 / c` with `c` the sqrt-weight uncertainty constant of the ball
/// `|xi| <= lambda0^(1/gamma)`.
pub fn calibrate_m(field: &ObservationField, gamma: f64, lambda0: f64, options: &EigenOptions) -> Result<f64> {
    let grid = SpectralGrid::of_field(field)?;
    let mask = build_mask(grid, MaskKind::Ball { radius: lambda0.powf(1.0 / gamma) })?;
    let rep = uncertainty_constant(field, &mask, Weight::Sqrt, options)?;
    if !(rep.eigenvalue > options.tol) {
        return Err(Error::precondition(format!(
            "the field does not observe the ball of radius {}: c = {:.3e}",
            lambda0.powf(1.0 / gamma),
            rep.eigenvalue
        )));
    }
    Ok(2.0 / rep.eigenvalue)
}

/// Resolvent constants over a range of spectral parameters at fixed `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowFrequencyReport {
    pub gamma: f64,
    pub m: f64,
    pub cutoff: f64,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub max: f64,
    pub ceiling: f64,
    pub bounded: bool,
}

/// Sweeps [`resolvent_constant`] over `lambdas` and flags whether the
/// largest `M` stays below `ceiling`.
pub fn low_freq_extension_check(
    field: &ObservationField,
    gamma: f64,
    lambdas: &[f64],
    m: f64,
    cutoff: f64,
    ceiling: f64,
    options: &EigenOptions,
) -> Result<LowFrequencyReport> {
    let values = lambdas
        .iter()
        .map(|&l| resolvent_constant(field, cutoff, gamma, l, m, options).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let max = values.iter().copied().fold(0.0, f64::max);
    Ok(LowFrequencyReport {
        gamma,
        m,
        cutoff,
        lambdas: lambdas.to_vec(),
        bounded: max <= ceiling,
        max,
        ceiling,
        values,
    })
}

/// `|(A - lambda) u|^2` for `u = sum_j c_j e^{i xi_j x}` in the mean
/// normalisation, evaluated on the frequency side.
pub fn symbol_norm_sq(mask: &FrequencyMask, gamma: f64, lambda: f64, c: &DVector<Complex64>) -> f64 {
    (0..mask.rank())
        .map(|i| (mask.norm(i).powf(gamma) - lambda).powi(2) * c[i].norm_sqr())
        .sum()
}

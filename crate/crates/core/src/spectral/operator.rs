//! Compressions of multiplication operators to frequency masks and the
//! Hermitian eigensolvers used on them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mask::{FrequencyMask, SpectralGrid};
use crate::fft::{coefficients, FftNd};
use crate::{Error, Result};

/// Eigensolver settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Largest rank solved by a dense Hermitian eigendecomposition.
    pub dense_limit: usize,
    /// Residual `|G v - mu v| / max(1, |G|)` required of the
    /// reported eigenpair.
    pub tol: f64,
    /// Lanczos iteration cap above the dense limit.
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_limit: 2000,
            tol: 1e-8,
            max_iter: 800,
        }
    }
}

/// Which end of the spectrum to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

/// An extreme eigenpair with its residual.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: DVector<Complex64>,
    pub residual: f64,
    pub solver: &'static str,
}

/// `Pi M_w Pi` on the span of the mask's exponentials, normalised so that
/// `<G c, c> = mean(w |u|^2)` for `u = sum_j c_j e^{i xi_j x}`.
pub struct Compression<'a> {
    mask: &'a FrequencyMask,
    weights: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl<'a> Compression<'a> {
    pub fn new(mask: &'a FrequencyMask, weights: Vec<f64>) -> Result<Self> {
        let g = mask.grid;
        if weights.len() != g.len() {
            return Err(Error::invalid("weights", weights.len(), format!("one value per grid node ({})", g.len())));
        }
        let coeffs = coefficients(&weights, g.dim, g.n);
        Ok(Compression { mask, weights, coeffs })
    }

    pub fn rank(&self) -> usize {
        self.mask.rank()
    }

    fn coefficient(&self, a: [i64; 2], b: [i64; 2]) -> Complex64 {
        self.coeffs[self.mask.grid.fft_index([a[0] - b[0], a[1] - b[1]])]
    }

    /// `G_ij = w_hat[k_i - k_j]`.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let p = &self.mask.points;
        DMatrix::from_fn(p.len(), p.len(), |i, j| self.coefficient(p[i], p[j]))
    }

    /// Matrix-free product through two FFTs.
    pub(crate) fn apply(&self, plan: &FftNd, c: &DVector<Complex64>) -> DVector<Complex64> {
        let g: SpectralGrid = self.mask.grid;
        let mut buf = vec![Complex64::new(0.0, 0.0); g.len()];
        for (k, v) in self.mask.points.iter().zip(c.iter()) {
            buf[g.fft_index(*k)] = *v;
        }
        plan.inverse(&mut buf);
        let scale = 1.0 / g.len() as f64;
        for (b, w) in buf.iter_mut().zip(&self.weights) {
            *b *= w * scale;
        }
        plan.forward(&mut buf);
        DVector::from_iterator(self.rank(), self.mask.points.iter().map(|k| buf[g.fft_index(*k)]))
    }

    /// Extreme eigenpair, dense up to `options.dense_limit` and by Lanczos
    /// above it.
    pub fn extreme(&self, which: Extreme, options: &EigenOptions) -> Result<Eigenpair> {
        if self.rank() <= options.dense_limit {
            dense_extreme(self.dense(), which, options)
        } else {
            let plan = FftNd::new(self.mask.grid.dim, self.mask.grid.n);
            lanczos(|v| self.apply(&plan, v), self.rank(), which, options)
        }
    }
}

fn residual(m: &DMatrix<Complex64>, v: &DVector<Complex64>, mu: f64) -> f64 {
    let r = m * v - v * Complex64::new(mu, 0.0);
    r.norm() / v.norm()
}

/// Extreme eigenpair of a dense Hermitian matrix.
pub fn dense_extreme(m: DMatrix<Complex64>, which: Extreme, options: &EigenOptions) -> Result<Eigenpair> {
    if m.nrows() == 0 {
        return Err(Error::precondition("empty matrix"));
    }
    let eig = m.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let idx = match which {
        Extreme::Smallest => eig.eigenvalues.imin(),
        Extreme::Largest => eig.eigenvalues.imax(),
    };
    let value = eig.eigenvalues[idx];
    let vector = eig.eigenvectors.column(idx).into_owned();
    let res = residual(&m, &vector, value) / scale;
    if !(res <= options.tol) {
        return Err(Error::Numerical {
            what: "dense Hermitian eigensolve".into(),
            residual: res,
        });
    }
    Ok(Eigenpair {
        value,
        vector,
        residual: res,
        solver: "dense",
    })
}

/// Lanczos with full reorthogonalisation for an extreme eigenpair of the
/// Hermitian operator `apply` of size `n`.
pub fn lanczos<F>(apply: F, n: usize, which: Extreme, options: &EigenOptions) -> Result<Eigenpair>
where
    F: Fn(&DVector<Complex64>) -> DVector<Complex64>,
{
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let start = DVector::from_fn(n, |i, _| Complex64::new(1.0 + ((i * 7919) % 97) as f64 / 97.0, ((i * 104_729) % 89) as f64 / 89.0));
    let mut q = start.normalize();
    let steps = options.max_iter.min(n);
    let mut best: Option<(f64, DVector<Complex64>, f64)> = None;
    for step in 0..steps {
        let mut w = apply(&q);
        let a = q.dotc(&w).re;
        basis.push(q.clone());
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let bnorm = w.norm();
        let check = step + 1 == steps || bnorm < 1e-14 || step % 10 == 9;
        if check {
            let k = alpha.len();
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = t.symmetric_eigen();
            let idx = match which {
                Extreme::Smallest => eig.eigenvalues.imin(),
                Extreme::Largest => eig.eigenvalues.imax(),
            };
            let theta = eig.eigenvalues[idx];
            let y = eig.eigenvectors.column(idx);
            let mut v = DVector::zeros(n);
            for (b, c) in basis.iter().zip(y.iter()) {
                v += b * Complex64::new(*c, 0.0);
            }
            let r = (apply(&v) - &v * Complex64::new(theta, 0.0)).norm() / v.norm();
            best = Some((theta, v, r));
            if r <= options.tol || bnorm < 1e-14 {
                break;
            }
        }
        if bnorm < 1e-14 {
            break;
        }
        beta.push(bnorm);
        q = w / Complex64::new(bnorm, 0.0);
    }
    let (value, vector, res) = best.expect("at least one Lanczos step");
    if !(res <= options.tol) {
        return Err(Error::Numerical {
            what: format!("Lanczos iteration after {} steps", alpha.len()),
            residual: res,
        });
    }
    Ok(Eigenpair {
        value,
        vector,
        residual: res,
        solver: "lanczos",
    })
}

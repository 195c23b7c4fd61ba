use std::f64::consts::PI;

use num_complex::Complex64;
use obslab::evolution::{
    cost_curve, gauss_legendre, linear_fit, miller_cost, observability_gramian, GramianOptions, PropagatorSpec,
    Quadrature, QuadratureRule,
};
use obslab::geometry::ObservationField;
use obslab::spectral::{build_mask, Compression, MaskKind, SpectralGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bump_field_1d() -> ObservationField {
    ObservationField::periodic_square(1, 0.5, 6.0, 128).unwrap().mollified(0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn propagator_is_a_unitary_group(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0, beta in 0.0f64..=1.0) {
        let g = SpectralGrid::new(2, 16, 5.0).unwrap();
        let p = PropagatorSpec::new(g, beta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let ab = p.propagate(&p.propagate(&u, s).unwrap(), t).unwrap();
        let direct = p.propagate(&u, s + t).unwrap();
        prop_assert!(ab.iter().zip(&direct).all(|(x, y)| (x - y).norm() < 1e-9));
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((norm(&direct) - norm(&u)).abs() < 1e-10 * norm(&u));
        let back = p.propagate(&direct, -(s + t)).unwrap();
        prop_assert!(back.iter().zip(&u).all(|(x, y)| (x - y).norm() < 1e-9));
    }
}

#[test]
fn quadrature_integrates_oscillations() {
    for rule in [QuadratureRule::GaussLegendre, QuadratureRule::Trapezoid] {
        let (t, w) = (1.7, 13.0);
        let q = Quadrature::new(rule, 4000, t).unwrap();
        let approx: f64 = q.nodes.iter().zip(&q.weights).map(|(x, wt)| wt * (w * x).cos()).sum();
        let exact = (w * t).sin() / w;
        assert!((approx - exact).abs() < 1e-5, "{rule:?}");
    }
    // an n-point rule is exact for degree 2n - 1
    let (x, w) = gauss_legendre(5);
    for deg in 0..10 {
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
        let exact = if deg % 2 == 0 { 2.0 / (deg + 1) as f64 } else { 0.0 };
        assert!((approx - exact).abs() < 1e-13, "degree {deg}");
    }
}

#[test]
fn gramian_matches_direct_time_integration() {
    let f = bump_field_1d();
    let (beta, t, cutoff) = (1.0, 0.5, 6.0);
    let grid = SpectralGrid::of_field(&f).unwrap();
    let mask = build_mask(grid, MaskKind::Ball { radius: cutoff }).unwrap();
    let g = Compression::new(&mask, f.values().to_vec()).unwrap();
    let rank = g.rank();
    let omega: Vec<f64> = (0..rank).map(|i| mask.norm(i).powf(beta + 1.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c: Vec<Complex64> = (0..rank).map(|_| Complex64::new(rng.random(), rng.random())).collect();
    let h = grid.period / grid.n as f64;
    // mean over x of a |S(s) u|^2, u = sum_j c_j exp(i xi_j x)
    let observed = |s: f64| -> f64 {
        (0..grid.n)
            .map(|i| {
                let x = i as f64 * h;
                let u: Complex64 = (0..rank)
                    .map(|j| c[j] * Complex64::from_polar(1.0, mask.xi(j)[0] * x - omega[j] * s))
                    .sum();
                f.values()[i] * u.norm_sqr()
            })
            .sum::<f64>()
            / grid.n as f64
    };
    // composite Simpson
    let steps = 4000;
    let dt = t / steps as f64;
    let integral = (0..=steps)
        .map(|k| {
            let w = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            w * observed(k as f64 * dt)
        })
        .sum::<f64>()
        * dt
        / 3.0;
    let a = g.dense();
    let quad = Quadrature::new(QuadratureRule::GaussLegendre, 240, t).unwrap();
    let mut form = Complex64::new(0.0, 0.0);
    for i in 0..rank {
        for j in 0..rank {
            let e: Complex64 = quad
                .nodes
                .iter()
                .zip(&quad.weights)
                .map(|(s, w)| Complex64::from_polar(*w, (omega[i] - omega[j]) * s))
                .sum();
            form += c[i].conj() * a[(i, j)] * e * c[j];
        }
    }
    assert!((form.re - integral).abs() < 1e-9 * integral, "{} vs {integral}", form.re);
    // the reported smallest eigenvalue lies below this Rayleigh quotient
    let rep = observability_gramian(&f, beta, t, cutoff, &GramianOptions::default()).unwrap();
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    assert!(rep.lambda_min <= integral / norm * (1.0 + 1e-9));
}

#[test]
fn gramian_converges_in_the_node_count() {
    let f = bump_field_1d();
    let base = observability_gramian(&f, 0.5, 1.0, 8.0, &GramianOptions::default()).unwrap();
    let opts = GramianOptions {
        n_nodes: Some(2 * base.n_nodes),
        ..Default::default()
    };
    let fine = observability_gramian(&f, 0.5, 1.0, 8.0, &opts).unwrap();
    assert!((base.lambda_min - fine.lambda_min).abs() < 1e-6 * fine.lambda_min.max(1e-3));
    let trap = GramianOptions {
        rule: QuadratureRule::Trapezoid,
        n_nodes: Some(8 * base.n_nodes),
        ..Default::default()
    };
    let t = observability_gramian(&f, 0.5, 1.0, 8.0, &trap).unwrap();
    assert!((t.lambda_min - fine.lambda_min).abs() < 1e-4);
}

#[test]
fn gramian_is_monotone_in_cutoff_and_time() {
    let f = bump_field_1d();
    let opts = GramianOptions::default();
    let mut last = f64::INFINITY;
    for cutoff in [2.0, 4.0, 8.0, 16.0] {
        let r = observability_gramian(&f, 1.0, 1.0, cutoff, &opts).unwrap();
        assert!(r.lambda_min <= last * (1.0 + 1e-9), "cutoff {cutoff}");
        // a <= 1 gives G_T <= T
        assert!(r.lambda_min <= 1.0 + 1e-12);
        last = r.lambda_min;
    }
    let times = [0.25, 0.5, 1.0, 2.0];
    let curve = cost_curve(&f, 1.0, &times, 8.0, &opts).unwrap();
    assert!(curve.monotone);
    assert!(curve.reports.windows(2).all(|w| w[0].lambda_min <= w[1].lambda_min * (1.0 + 1e-9)));
}

#[test]
fn miller_cost_and_linear_fit() {
    assert!(miller_cost(1.0, 2.0, PI, 0.1).is_none());
    let t = 2.0 * PI;
    let expected = 2.0 * t / (t * t - (PI * PI + 0.1));
    assert!((miller_cost(1.0, 2.0, t, 0.1).unwrap() - expected).abs() < 1e-15);
    assert!(miller_cost(1.0, 2.0, t, 0.0).is_none());
    let x: Vec<f64> = (0..7).map(|i| i as f64 * 0.3).collect();
    let y: Vec<f64> = x.iter().map(|x| 2.5 - 1.25 * x).collect();
    let fit = linear_fit(&x, &y);
    assert!((fit.slope + 1.25).abs() < 1e-12 && (fit.intercept - 2.5).abs() < 1e-12 && fit.r_squared > 1.0 - 1e-12);
}

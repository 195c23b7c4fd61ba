use obslab::construct::{
    bump, build_partition, measure_bump_constants, random_density, smooth_minorant, transfer_function, BallSystem,
    MinorantOptions, SampledFunction, BUMP,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn window_min(values: &[f64], lo: usize, hi: usize, w: usize) -> f64 {
    (lo..=hi - w)
        .map(|s| values[s..s + w].iter().sum::<f64>() / w as f64)
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transfer_function_matches_its_bounds(seed in any::<u64>(), m in 0.5f64..2.0, rho in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = SampledFunction::zeros(-3.0, m / 50.0, 50 * 16);
        let (b, part) = random_density(&mut rng, &grid, m, rho).unwrap();
        let tf = transfer_function(&b, rho, &part).unwrap();
        // oracle: direct antiderivative from the node of 0
        let (first, last) = (part.nodes[0], *part.nodes.last().unwrap());
        let zero = b.index(0.0);
        let direct = |j: usize| -> f64 {
            let (lo, hi, sign) = if j >= zero { (zero, j, 1.0) } else { (j, zero, -1.0) };
            sign * (lo..hi).map(|k| (b.values[k] - rho) * b.spacing).sum::<f64>()
        };
        for j in (first..=last).step_by(7) {
            prop_assert!((tf.values.values[j - first] - direct(j)).abs() < 1e-10);
        }
        let sup = b.sup();
        prop_assert!(tf.max_abs <= 4.0 * part.max_gap * sup);
        prop_assert!(tf.max_from_anchor <= 2.0 * part.max_gap * sup);
        prop_assert!(tf.breakpoint_spread <= 1e-10);
        prop_assert!(part.max_gap <= m * (1.0 + 1e-12));
    }

    #[test]
    fn almost_periodic_density_is_relatively_dense(seed in any::<u64>(), rho in 0.05f64..0.95) {
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = SampledFunction::zeros(0.0, m / 40.0, 40 * 12);
        let (b, part) = random_density(&mut rng, &grid, m, rho).unwrap();
        let (first, last) = (part.nodes[0], *part.nodes.last().unwrap());
        let w = (2.0 * m / b.spacing).round() as usize;
        let floor = rho * part.min_gap / (2.0 * m);
        prop_assert!(window_min(&b.values, first, last, w) >= floor * (1.0 - 1e-12));
    }
}

#[test]
fn bump_mass_exceeds_half() {
    assert!(BUMP.c1 > 0.5);
    let n = 200_000;
    let h = 2.0 / n as f64;
    let mass: f64 = (0..n).map(|j| bump(-1.0 + (j as f64 + 0.5) * h)).sum::<f64>() * h;
    assert!((mass / 2.0 - BUMP.c1).abs() < 1e-9);
    assert!(measure_bump_constants(20_000).c1 > 0.5);
}

#[test]
fn bump_derivatives_respect_c2() {
    let n = 40_000;
    let h = 2.0 / n as f64;
    let f: Vec<f64> = (0..=n).map(|j| bump(-1.0 + j as f64 * h)).collect();
    let mut d = f.clone();
    for order in 1..=3 {
        d = d.windows(2).map(|p| (p[1] - p[0]) / h).collect();
        let max = d.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        // |I| = 2 for the bump on (-1, 1)
        assert!(max <= BUMP.c2.powi(order) * 2f64.powi(-order) * (1.0 + 1e-3), "order {order}: {max}");
    }
}

#[test]
fn minorant_on_a_regular_system() {
    let (m, rho, delta): (f64, f64, f64) = (1.0, 0.5, 0.1);
    let per_unit = (40.0 / (rho * delta)).ceil();
    let h = m / per_unit;
    let grid = SampledFunction::zeros(0.0, h, (10.0 * per_unit) as usize);
    // balls of length 0.2 every 0.3 cover two thirds of every long window
    let centers: Vec<f64> = (0..33).map(|k| 0.15 + 0.3 * k as f64).filter(|c| c + delta <= 10.0).collect();
    let balls = BallSystem::new(centers.iter().map(|c| (c / h).round() * h).collect(), delta).unwrap();
    let sm = smooth_minorant(&balls, m, rho, &grid, &MinorantOptions::default()).unwrap();
    assert!(sm.report.pass, "{:?}", sm.report);
    assert!((sm.eta - BUMP.c1 * rho / 2.0).abs() < 1e-15);
    let (lo, hi) = (sm.partition.nodes[0], *sm.partition.nodes.last().unwrap());
    let w = (2.0 * m / h).round() as usize;
    assert!(window_min(&sm.a.values, lo, hi, w) >= rho / 8.0);
    for (j, &v) in sm.a.values.iter().enumerate() {
        if v > 0.0 {
            assert!(balls.contains(sm.a.node(j)));
        }
    }
}

#[test]
fn partition_breakpoints_avoid_the_balls() {
    let grid = SampledFunction::zeros(0.0, 0.01, 1000);
    let balls = BallSystem::new(vec![0.5, 1.2, 3.0, 3.3], 0.1).unwrap();
    let b = balls.indicator(&grid);
    let part = build_partition(&b, &balls, 1.0).unwrap();
    for &s in &part.breakpoints {
        assert!(!balls.contains(s), "breakpoint {s} inside a ball");
    }
    // gaps lie in [M, M + 2 delta] up to one grid step
    assert!(part
        .breakpoints
        .windows(2)
        .all(|w| w[1] - w[0] >= 1.0 - 0.011 && w[1] - w[0] <= 1.2 + 0.011));
}

#[test]
fn sparse_system_is_rejected() {
    let grid = SampledFunction::zeros(0.0, 0.001, 8000);
    let balls = BallSystem::new(vec![1.0, 5.0], 0.05).unwrap();
    assert!(smooth_minorant(&balls, 1.0, 0.5, &grid, &MinorantOptions::default()).is_err());
}

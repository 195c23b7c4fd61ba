use std::collections::HashSet;
use std::f64::consts::TAU;

use obslab::covering::{
    bezout_bounded, dirichlet_direction, farey_directions, periodic_effective_covering, periodic_lambda0,
    product_effective_covering, product_lambda0, verify_covering,
};
use obslab::geometry::Direction;
use proptest::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #[test]
    fn bezout_pairs_are_bounded(p in 1i64..100_000, q in 1i64..100_000, frac in 0.0f64..1.0, sp in any::<bool>(), sq in any::<bool>()) {
        prop_assume!(gcd(p, q) == 1);
        let n = 1 + ((p * q - 1) as f64 * frac) as i64;
        let (p, q) = (if sp { -p } else { p }, if sq { -q } else { q });
        let (a, b) = bezout_bounded(p, q, n).unwrap();
        prop_assert_eq!(a as i128 * p as i128 + b as i128 * q as i128, n as i128);
        prop_assert!(a.abs() <= q.abs() && b.abs() <= p.abs());
    }

    #[test]
    fn dirichlet_is_near_the_brute_force_best(angle in 0.0f64..TAU, e in 1.0f64..3.0) {
        let lambda = 16f64.powf(e);
        let gamma = 0.25;
        let cap = lambda.powf(gamma);
        let r = dirichlet_direction(Direction::from_angle(angle), lambda, gamma).unwrap();
        let t = ((r.p * r.p + r.q * r.q) as f64).sqrt();
        let ours = circle_distance(angle, (r.q as f64).atan2(r.p as f64));
        let bound = 2.0 / (cap * t);
        prop_assert!(ours <= bound && t <= 2.0 * cap);
        let c = cap.floor() as i64;
        let mut best = f64::INFINITY;
        for p in -c..=c {
            for q in -c..=c {
                if gcd(p, q) == 1 {
                    best = best.min(circle_distance(angle, (q as f64).atan2(p as f64)));
                }
            }
        }
        prop_assert!(ours - best <= bound);
    }
}

#[test]
fn bezout_rejects_bad_input() {
    assert!(bezout_bounded(4, 6, 3).is_err());
    assert!(bezout_bounded(3, 5, 0).is_err());
    assert!(bezout_bounded(3, 5, 16).is_err());
}

#[test]
fn coverings_verify_over_the_parameter_grid() {
    for rho in [0.25, 0.5, 1.0] {
        for scale in [1.0, 4.0, 16.0] {
            let lambda = scale * periodic_lambda0(rho);
            let cov = periodic_effective_covering(0.3, rho, lambda, 0.25).unwrap();
            let rep = verify_covering(&cov);
            assert!(rep.covers && rep.budget_ok, "periodic rho={rho} lambda={lambda}: {rep:?}");

            let lambda = scale * product_lambda0(1.0, 20.0, rho);
            let cov = product_effective_covering(1.0, 20.0, rho, lambda, (0.6, 0.6)).unwrap();
            let rep = verify_covering(&cov);
            assert!(rep.covers && rep.budget_ok, "product rho={rho} lambda={lambda}: {rep:?}");
        }
    }
}

#[test]
fn coverings_below_lambda0_are_rejected() {
    assert!(periodic_effective_covering(0.3, 0.5, 0.5 * periodic_lambda0(0.5), 0.25).is_err());
    assert!(product_effective_covering(1.0, 20.0, 0.5, 0.5 * product_lambda0(1.0, 20.0, 0.5), (0.6, 0.6)).is_err());
}

#[test]
fn periodic_covering_contains_every_short_direction() {
    let rho = 0.5;
    let lambda = 3.0 * periodic_lambda0(rho);
    let n = lambda.powf(0.25);
    let cov = periodic_effective_covering(0.3, rho, lambda, 0.25).unwrap();
    let used: HashSet<(i64, i64)> = cov.entries.iter().filter_map(|e| e.rational.map(|r| (r.p, r.q))).collect();
    let r = (2.0 * n).floor() as i64;
    let mut expected = 0;
    for p in -r..=r {
        for q in -r..=r {
            if gcd(p, q) == 1 && ((p * p + q * q) as f64).sqrt() <= 2.0 * n {
                expected += 1;
                assert!(used.contains(&(p, q)), "({p}, {q}) missing");
            }
        }
    }
    assert_eq!(used.len(), expected);
}

#[test]
fn farey_directions_are_sorted_and_coprime() {
    let dirs = farey_directions(7.5);
    assert!(dirs.windows(2).all(|w| w[0].direction().angle() < w[1].direction().angle()));
    assert!(dirs.iter().all(|r| gcd(r.p, r.q) == 1 && r.t() <= 7.5));
    assert!(dirs.iter().any(|r| (r.p, r.q) == (7, 2)));
}

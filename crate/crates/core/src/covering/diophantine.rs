//! Rational directions, bounded Bézout pairs and Dirichlet approximation.

use serde::{Deserialize, Serialize};

use crate::geometry::Direction;
use crate::rational::{convergents, gcd};
use crate::{Error, Result};

/// The lattice direction `(P, Q) / T` with `gcd(|P|, |Q|) = 1` and
/// `T = sqrt(P^2 + Q^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalDirection {
    pub p: i64,
    pub q: i64,
}

impl RationalDirection {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p, q) != 1 {
            return Err(Error::invalid("(P, Q)", format!("({p}, {q})"), "a coprime pair"));
        }
        Ok(RationalDirection { p, q })
    }

    /// `T = |(P, Q)|`, the period of the lifted line.
    pub fn t(&self) -> f64 {
        ((self.p * self.p + self.q * self.q) as f64).sqrt()
    }

    pub fn direction(&self) -> Direction {
        Direction::from_vector(self.p as f64, self.q as f64)
    }

    /// Representative of the orbit under sign changes and, if `symmetric`,
    /// under the symmetries of the square as well.
    pub(crate) fn canonical(&self, symmetric: bool) -> (i64, i64) {
        if symmetric {
            let (a, b) = (self.p.abs(), self.q.abs());
            (a.max(b), a.min(b))
        } else if self.p < 0 || (self.p == 0 && self.q < 0) {
            (-self.p, -self.q)
        } else {
            (self.p, self.q)
        }
    }
}

/// Extended Euclid: `(g, x, y)` with `x a + y b = g = gcd(a, b)`, `a, b >= 0`.
fn extended_euclid(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    (r0, s0, t0)
}

/// Integers `(a, b)` with `a P + b Q = n`, `|a| <= |Q|` and `|b| <= |P|`.
///
/// Starting from any Bézout pair scaled by `n`, the shift by
/// `k = floor(n a / |Q|)` puts `a` in `[0, |Q|)`, which forces `b` into
/// `(-|P|, |P|]` whenever `n <= |PQ|`.
pub fn bezout_bounded(p: i64, q: i64, n: i64) -> Result<(i64, i64)> {
    if gcd(p, q) != 1 {
        return Err(Error::invalid("(P, Q)", format!("({p}, {q})"), "a coprime pair"));
    }
    let (pa, qa) = (p.unsigned_abs() as i128, q.unsigned_abs() as i128);
    if !(1..=(pa * qa)).contains(&(n as i128)) {
        return Err(Error::invalid("n", n, format!("an integer in [1, |PQ|] = [1, {}]", pa * qa)));
    }
    let (_, x, y) = extended_euclid(pa, qa);
    let (a, b) = (n as i128 * x, n as i128 * y);
    let k = a.div_euclid(qa);
    let (a, b) = (a - k * qa, b + k * pa);
    debug_assert_eq!(a * pa + b * qa, n as i128);
    Ok(((a * p.signum() as i128) as i64, (b * q.signum() as i128) as i64))
}

/// Rational direction `(P, Q)/T` within `2 / (lambda^gamma T)` of `phi`
/// (angular distance) with `T <= sqrt(2) lambda^gamma`.
///
/// After permuting axes so that `|slope| <= 1`, the last continued-fraction
/// convergent with denominator at most `lambda^gamma` is used.
pub fn dirichlet_direction(phi: Direction, lambda: f64, gamma: f64) -> Result<RationalDirection> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", lambda, "a frequency >= 1"));
    }
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::invalid("gamma", gamma, "a value in (0, 1/2)"));
    }
    let cap = lambda.powf(gamma).floor();
    let [ux, uy] = phi.unit();
    let swap = uy.abs() > ux.abs();
    let (big, small) = if swap { (uy, ux) } else { (ux, uy) };
    let slope = (small / big).abs();
    let &(h, k) = convergents(slope, cap).last().expect("floor(slope)/1 is always a convergent");
    let (big_i, small_i) = (k * big.signum() as i64, h * if small < 0.0 { -1 } else { 1 });
    let (p, q) = if swap { (small_i, big_i) } else { (big_i, small_i) };
    RationalDirection::new(p, q)
}

/// Every coprime `(P, Q)` with `sqrt(P^2 + Q^2) <= t_max`, sorted by angle.
pub fn farey_directions(t_max: f64) -> Vec<RationalDirection> {
    let r = t_max.floor() as i64;
    let mut out = Vec::new();
    for p in -r..=r {
        for q in -r..=r {
            if ((p * p + q * q) as f64) <= t_max * t_max && gcd(p, q) == 1 {
                out.push(RationalDirection { p, q });
            }
        }
    }
    out.sort_by(|a, b| a.direction().angle().total_cmp(&b.direction().angle()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout_bounded(3, 5, 7).unwrap(), (4, -1));
        assert_eq!(bezout_bounded(2, 5, 10).unwrap(), (0, 2));
        let (a, b) = bezout_bounded(1, 1, 1).unwrap();
        assert_eq!(a + b, 1);
        let (a, b) = bezout_bounded(-3, 5, 15).unwrap();
        assert_eq!(-3 * a + 5 * b, 15);
        assert!(a.abs() <= 5 && b.abs() <= 3);
        assert!(bezout_bounded(2, 4, 3).is_err());
        assert!(bezout_bounded(3, 5, 16).is_err());
        assert!(bezout_bounded(3, 5, 0).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let d = dirichlet_direction(Direction::horizontal(), 4096.0, 0.25).unwrap();
        assert_eq!((d.p, d.q), (1, 0));
        let d = dirichlet_direction(Direction::from_vector(3.0, 4.0), 625.0, 0.25).unwrap();
        assert_eq!((d.p, d.q), (3, 4));
        let phi = Direction::from_angle(1.0);
        let d = dirichlet_direction(phi, 4096.0, 0.25).unwrap();
        assert!(phi.distance(&d.direction()) <= 2.0 / (8.0 * d.t()));
    }

    #[test]
    fn farey_small() {
        let dirs = farey_directions(1.2);
        assert_eq!(dirs.len(), 4);
        assert_eq!(farey_directions(1.5).len(), 8);
    }
}

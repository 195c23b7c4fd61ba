//! Small integer helpers: gcd and continued-fraction convergents.

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Convergents `h/k` of `x` with `k <= max_den`, in order of increasing
/// denominator. The first convergent is `floor(x)/1`.
pub(crate) fn convergents(x: f64, max_den: f64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut h1, mut h2) = (1i64, 0i64);
    let (mut k1, mut k2) = (0i64, 1i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (h, k) = (a * h1 + h2, a * k1 + k2);
        if k as f64 > max_den {
            break;
        }
        out.push((h, k));
        (h2, h1, k2, k1) = (h1, h, k1, k);
        let frac = r - a as f64;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Recognises `unit` as `(p, q) / sqrt(p^2 + q^2)` with coprime integers
/// and `max(|p|, |q|) <= max_den`.
pub(crate) fn lattice_direction(unit: [f64; 2], max_den: i64) -> Option<(i64, i64)> {
    let (ux, uy) = (unit[0], unit[1]);
    let swap = uy.abs() > ux.abs();
    let (a, b) = if swap { (uy, ux) } else { (ux, uy) };
    if a == 0.0 {
        return None;
    }
    let slope = (b / a).abs();
    let &(h, k) = convergents(slope, max_den as f64)
        .iter()
        .find(|&&(h, k)| (slope - h as f64 / k as f64).abs() < 1e-12)?;
    let (big, small) = (k * a.signum() as i64, h * b.signum() as i64);
    Some(if swap { (small, big) } else { (big, small) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents_of_known_numbers() {
        assert_eq!(convergents(0.5, 10.0), vec![(0, 1), (1, 2)]);
        let pi = convergents(std::f64::consts::PI, 200.0);
        assert_eq!(pi.last(), Some(&(355, 113)));
        assert_eq!(gcd(-12, 18), 6);
    }

    #[test]
    fn recognises_lattice_directions() {
        let t = 29f64.sqrt();
        assert_eq!(lattice_direction([2.0 / t, 5.0 / t], 100), Some((2, 5)));
        assert_eq!(lattice_direction([-5.0 / t, 2.0 / t], 100), Some((-5, 2)));
        assert_eq!(lattice_direction([0.0, -1.0], 100), Some((0, -1)));
        assert_eq!(lattice_direction([1.0f64.cos(), 1.0f64.sin()], 1000), None);
    }
}

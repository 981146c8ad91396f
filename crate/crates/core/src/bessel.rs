//! Bessel functions of the first kind, orders 0 and 1, and their zeros.

/// `J_n(x)` for `n` in {0, 1} by the power series; accurate for `|x| <= 20`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = if n == 0 { 1.0 } else { half };
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n as usize) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

pub fn j0(x: f64) -> f64 {
    bessel_j(0, x)
}

pub fn j1(x: f64) -> f64 {
    bessel_j(1, x)
}

/// `k`-th positive zero (k >= 1) of `J_n`, by bracketing on a fine scan and
/// Newton polishing (`J0' = -J1`, `J1' = J0 - J1/x`).
pub fn bessel_zero(n: u32, k: usize) -> f64 {
    assert!(k >= 1 && n <= 1);
    let f = |x: f64| bessel_j(n, x);
    let step = 0.05;
    let mut a = 0.5;
    let mut found = 0;
    loop {
        let b = a + step;
        if f(a).signum() != f(b).signum() {
            found += 1;
            if found == k {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo).signum() == f(mid).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 {
                        break;
                    }
                }
                let mut x = 0.5 * (lo + hi);
                for _ in 0..3 {
                    let d = if n == 0 { -j1(x) } else { j0(x) - j1(x) / x };
                    x -= f(x) / d;
                }
                return x;
            }
        }
        a = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((j0(0.0) - 1.0).abs() < 1e-16);
        assert_eq!(j1(0.0), 0.0);
        assert!((j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn first_zeros() {
        assert!((bessel_zero(1, 1) - 3.831_705_970_2).abs() < 1e-10);
        assert!((bessel_zero(0, 1) - 2.404_825_557_7).abs() < 1e-10);
        assert!((bessel_zero(0, 2) - 5.520_078_110_3).abs() < 1e-9);
    }
}

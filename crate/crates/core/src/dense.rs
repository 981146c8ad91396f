//! Small dense complex LU with partial pivoting.

use num_complex::Complex64;

use crate::error::{HelixError, Result};

type C = Complex64;

#[derive(Clone, Debug)]
pub struct DenseLu {
    n: usize,
    a: Vec<C>,
    piv: Vec<usize>,
}

impl DenseLu {
    /// Factors the row-major `n x n` matrix `a`.
    pub fn factor(n: usize, mut a: Vec<C>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return Err(HelixError::Solver {
                    residual: f64::INFINITY,
                    tol: 0.0,
                });
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
            }
            let inv = a[k * n + k].inv();
            for i in k + 1..n {
                let l = a[i * n + k] * inv;
                a[i * n + k] = l;
                if l != C::new(0.0, 0.0) {
                    for c in k + 1..n {
                        let u = a[k * n + c];
                        a[i * n + c] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, a, piv })
    }

    pub fn solve(&self, b: &[C]) -> Vec<C> {
        let n = self.n;
        let mut x: Vec<C> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for c in 0..i {
                s -= self.a[i * n + c] * x[c];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for c in i + 1..n {
                s -= self.a[i * n + c] * x[c];
            }
            x[i] = s / self.a[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 9;
        let a: Vec<C> = (0..n * n)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let x: Vec<C> = (0..n).map(|i| C::new(i as f64, -1.0)).collect();
        let b: Vec<C> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
            .collect();
        let got = DenseLu::factor(n, a).unwrap().solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-11);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = vec![C::new(0.0, 0.0); 4];
        assert!(DenseLu::factor(2, a).is_err());
    }
}

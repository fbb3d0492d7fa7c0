//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's numerics.

#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Gauss-Legendre nodes and weights on [0, 1], from Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact Gram-Schmidt of `1, s, ..., s^d` under
/// `<f, g> = int_0^1 f g + mu int_0^1 f' g'` with rational `mu`. Each
/// polynomial is kept as exact monomial coefficients together with its
/// squared norm.
pub struct ExactBasis {
    pub polys: Vec<Vec<BigRational>>,
    pub norms2: Vec<BigRational>,
}

impl ExactBasis {
    pub fn new(d: usize, mu: (i64, i64)) -> Self {
        let mu = rat(mu.0, mu.1);
        // Gram matrix of monomials
        let gram = |i: usize, j: usize| -> BigRational {
            let mut v = rat(1, (i + j + 1) as i64);
            if i > 0 && j > 0 {
                v += &mu * rat((i * j) as i64, (i + j - 1) as i64);
            }
            v
        };
        let inner = |a: &[BigRational], b: &[BigRational]| -> BigRational {
            let mut acc = BigRational::zero();
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    if !bj.is_zero() {
                        acc += ai * bj * gram(i, j);
                    }
                }
            }
            acc
        };
        let mut polys: Vec<Vec<BigRational>> = Vec::new();
        let mut norms2: Vec<BigRational> = Vec::new();
        for k in 0..=d {
            let mut q = vec![BigRational::zero(); d + 1];
            q[k] = BigRational::one();
            let e = q.clone();
            for (p, n2) in polys.iter().zip(&norms2) {
                let c = inner(&e, p) / n2;
                for (qi, pi) in q.iter_mut().zip(p) {
                    *qi -= &c * pi;
                }
            }
            norms2.push(inner(&q, &q));
            polys.push(q);
        }
        Self { polys, norms2 }
    }

    /// Orthonormal basis function `k` at a rational point, exact up to the
    /// final division by the norm.
    pub fn value(&self, k: usize, s: (i64, i64)) -> f64 {
        let s = rat(s.0, s.1);
        let mut acc = BigRational::zero();
        for c in self.polys[k].iter().rev() {
            acc = acc * &s + c;
        }
        let sign = if acc.is_negative() { -1.0 } else { 1.0 };
        // value^2 / norm^2 stays exact; only the last square root rounds
        let ratio = (&acc * &acc / &self.norms2[k]).to_f64().unwrap();
        sign * ratio.sqrt()
    }
}

impl ExactBasis {
    /// Orthonormal function `k` as f64 coefficients in `t = 2s - 1`, where
    /// the coefficients stay small enough for plain evaluation at degree 12+.
    pub fn centered(&self, k: usize) -> Vec<f64> {
        let n = self.polys[k].len();
        // p(s) = sum c_j ((t + 1) / 2)^j
        let mut out = vec![BigRational::zero(); n];
        let mut power = vec![BigRational::one()];
        for c in &self.polys[k] {
            for (o, p) in out.iter_mut().zip(&power) {
                *o += c * p;
            }
            let mut next = vec![BigRational::zero(); power.len() + 1];
            for (i, p) in power.iter().enumerate() {
                let half = p / BigInt::from(2);
                next[i] += &half;
                next[i + 1] += half;
            }
            power = next;
        }
        let norm = self.norms2[k].to_f64().unwrap().sqrt();
        out.iter().map(|c| c.to_f64().unwrap() / norm).collect()
    }

    /// `sum_k coeffs[k] B_k` as a closure of `s`.
    pub fn series(&self, coeffs: &[f64]) -> impl Fn(f64) -> f64 {
        let mut total = vec![0.0; self.polys[0].len()];
        for (k, c) in coeffs.iter().enumerate() {
            for (t, p) in total.iter_mut().zip(self.centered(k)) {
                *t += c * p;
            }
        }
        move |s| horner(&total, 2.0 * s - 1.0)
    }
}

/// Orthonormal shifted Legendre polynomial from its explicit sum,
/// `sqrt(2n + 1) sum_k (-1)^(n+k) C(n,k) C(n+k,k) s^k`, evaluated exactly
/// at a rational point.
pub fn shifted_legendre(n: usize, s: (i64, i64)) -> f64 {
    let s = rat(s.0, s.1);
    let binom = |a: usize, b: usize| -> BigInt {
        let mut r = BigInt::one();
        for i in 0..b {
            r = r * BigInt::from(a - i) / BigInt::from(i + 1);
        }
        r
    };
    let mut acc = BigRational::zero();
    let mut power = BigRational::one();
    for k in 0..=n {
        let c = binom(n, k) * binom(n + k, k);
        let term = BigRational::from_integer(c) * &power;
        if (n + k).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        power *= &s;
    }
    ((2 * n + 1) as f64).sqrt() * acc.to_f64().unwrap()
}

/// Discrete local extrema of `f` on `grid + 1` even points, ends included
/// when `f` moves away from them. `max` selects maxima.
pub fn grid_extrema(f: impl Fn(f64) -> f64, max: bool, grid: usize) -> Vec<f64> {
    let sign = if max { -1.0 } else { 1.0 };
    let v: Vec<f64> = (0..=grid).map(|k| sign * f(k as f64 / grid as f64)).collect();
    (0..=grid)
        .filter(|&k| (k == 0 || v[k] < v[k - 1]) && (k == grid || v[k] <= v[k + 1]))
        .map(|k| k as f64 / grid as f64)
        .collect()
}

/// Evaluates a monomial polynomial by Horner's rule.
pub fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

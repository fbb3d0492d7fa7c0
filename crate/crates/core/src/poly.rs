//! Polynomials on [0, 1] in the orthonormal shifted Legendre basis, plus the
//! bracketing root finder used for extremum enumeration.
//!
//! `L_k(s) = sqrt(2k + 1) * P_k(2s - 1)` is orthonormal under the plain
//! L2 inner product on [0, 1]. Evaluation runs the three-term recurrence, which
//! stays accurate at degrees where monomial coefficients would not.

/// A polynomial `sum_k a[k] * L_k(s)` on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreSeries {
    coeffs: Vec<f64>,
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl LegendreSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(vec![0.0; degree + 1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `self + factor * other`, padding the shorter operand with zeros.
    pub fn add_scaled(&self, other: &LegendreSeries, factor: f64) -> LegendreSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or(0.0);
                let b = other.coeffs.get(k).copied().unwrap_or(0.0);
                a + factor * b
            })
            .collect();
        LegendreSeries { coeffs }
    }

    pub fn value(&self, s: f64) -> f64 {
        let u = 2.0 * s - 1.0;
        let (mut p_prev, mut p) = (1.0, u);
        let mut acc = self.coeffs[0];
        for (k, &a) in self.coeffs.iter().enumerate().skip(1) {
            if k > 1 {
                let j = (k - 1) as f64;
                let next = ((2.0 * j + 1.0) * u * p - j * p_prev) / (j + 1.0);
                p_prev = p;
                p = next;
            }
            acc += a * ((2 * k + 1) as f64).sqrt() * p;
        }
        acc
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.jet(s).d1
    }

    /// Value, first and second derivative with respect to `s`.
    pub fn jet(&self, s: f64) -> Jet {
        let u = 2.0 * s - 1.0;
        // P_k, P_k', P_k'' in u for k-1 and k.
        let (mut p0, mut p1) = (1.0, u);
        let (mut dp0, mut dp1) = (0.0, 1.0);
        let (mut ddp0, mut ddp1) = (0.0, 0.0);
        let mut jet = Jet {
            value: self.coeffs[0],
            d1: 0.0,
            d2: 0.0,
        };
        for (k, &a) in self.coeffs.iter().enumerate().skip(1) {
            if k > 1 {
                let j = (k - 1) as f64;
                let c = 2.0 * j + 1.0;
                let p2 = (c * u * p1 - j * p0) / (j + 1.0);
                let dp2 = dp0 + c * p1;
                let ddp2 = ddp0 + c * dp1;
                (p0, p1) = (p1, p2);
                (dp0, dp1) = (dp1, dp2);
                (ddp0, ddp1) = (ddp1, ddp2);
            }
            let w = a * ((2 * k + 1) as f64).sqrt();
            jet.value += w * p1;
            jet.d1 += w * dp1;
            jet.d2 += w * ddp1;
        }
        // chain rule for u = 2s - 1
        jet.d1 *= 2.0;
        jet.d2 *= 4.0;
        jet
    }

    /// Monomial coefficients `m[j]` with `p(s) = sum_j m[j] s^j`.
    ///
    /// Only well conditioned for modest degrees; evaluation should go through
    /// [`LegendreSeries::value`].
    pub fn to_monomial(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.coeffs.len()];
        for (k, &a) in self.coeffs.iter().enumerate() {
            for (j, m) in legendre_monomial(k).into_iter().enumerate() {
                out[j] += a * m;
            }
        }
        out
    }

    /// Inverse of [`LegendreSeries::to_monomial`], via exact L2 projections.
    pub fn from_monomial(monomial: &[f64]) -> Self {
        assert!(!monomial.is_empty());
        let n = monomial.len();
        let coeffs = (0..n)
            .map(|k| {
                let lk = legendre_monomial(k);
                // <p, L_k> = sum_j sum_i m_j lk_i / (i + j + 1)
                let mut acc = 0.0;
                for (j, &m) in monomial.iter().enumerate() {
                    for (i, &l) in lk.iter().enumerate() {
                        acc += m * l / (i + j + 1) as f64;
                    }
                }
                acc
            })
            .collect();
        LegendreSeries { coeffs }
    }
}

/// Monomial coefficients of the orthonormal shifted Legendre polynomial `L_k`.
pub fn legendre_monomial(k: usize) -> Vec<f64> {
    let norm = ((2 * k + 1) as f64).sqrt();
    (0..=k)
        .map(|j| {
            let sign = if (k + j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(k, j) * binomial(k + j, j) * norm
        })
        .collect()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unnormalized Legendre values `P_0(u) ..= P_n(u)`.
pub(crate) fn legendre_values(u: f64, n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push(u);
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * u * out[j] - jf * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
}

/// A simple root of a function located by a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    pub s: f64,
    /// The function goes from negative to positive across the root.
    pub rising: bool,
}

/// Grid spacing per unit length used to isolate roots.
pub const ROOT_GRID: usize = 256;
/// Bracket width at which bisection stops.
pub const ROOT_TOL: f64 = 1e-12;

/// Isolates the sign changes of `f` strictly inside `(lo, hi)` on a uniform
/// grid of `intervals` cells, then bisects each bracket down to [`ROOT_TOL`].
///
/// Roots of even multiplicity and pairs of roots inside one cell are not
/// reported.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> Vec<SignChange> {
    let n = intervals.max(1);
    let h = (hi - lo) / n as f64;
    let grid: Vec<f64> = (0..=n)
        .map(|k| if k == n { hi } else { lo + h * k as f64 })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&s| f(s)).collect();

    let mut out = Vec::new();
    for k in 0..n {
        let (a, b) = (vals[k], vals[k + 1]);
        if a == 0.0 {
            // exact hit on an interior grid node
            if k > 0 && vals[k - 1] != 0.0 && b != 0.0 && (vals[k - 1] < 0.0) != (b < 0.0) {
                out.push(SignChange {
                    s: grid[k],
                    rising: b > 0.0,
                });
            }
            continue;
        }
        if b == 0.0 || (a < 0.0) == (b < 0.0) {
            continue;
        }
        out.push(SignChange {
            s: bisect(&f, grid[k], grid[k + 1], a),
            rising: a < 0.0,
        });
    }
    out
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

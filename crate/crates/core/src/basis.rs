//! Legendre-Sobolev orthonormal bases on [0, 1].
//!
//! The inner product is `<f, g> = int f g ds + mu * int f' g' ds`. Gram-Schmidt
//! runs on the orthonormal shifted Legendre polynomials `L_0, L_1, ...`, which
//! span the same nested subspaces as the monomials `1, s, s^2, ...`, so the
//! result is the same orthonormal family while the Gram matrix stays well
//! conditioned. Monomial coefficients are derived afterwards for reference.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{legendre_monomial, LegendreSeries};

pub const MIN_DEGREE: usize = 1;
pub const MAX_DEGREE: usize = 30;
pub const DEFAULT_DEGREE: usize = 12;
pub const DEFAULT_MU: f64 = 0.125;

/// Identifies a basis by its degree and Sobolev weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisId {
    pub degree: usize,
    pub mu: f64,
}

impl BasisId {
    pub fn new(degree: usize, mu: f64) -> Self {
        Self { degree, mu }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&self.degree) {
            return Err(Error::Config(format!(
                "degree {} outside {MIN_DEGREE}..={MAX_DEGREE}",
                self.degree
            )));
        }
        if !self.mu.is_finite() || self.mu < 0.0 {
            return Err(Error::Config(format!("mu must be finite and >= 0, got {}", self.mu)));
        }
        Ok(())
    }

    fn key(&self) -> (usize, u64) {
        (self.degree, self.mu.to_bits())
    }
}

impl Default for BasisId {
    fn default() -> Self {
        Self::new(DEFAULT_DEGREE, DEFAULT_MU)
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LS(degree={}, mu={})", self.degree, self.mu)
    }
}

/// An orthonormal Legendre-Sobolev basis `B_0 ..= B_d`.
pub struct LSBasis {
    id: BasisId,
    // row i: coefficients of B_i over L_0 ..= L_i
    legendre: Vec<Vec<f64>>,
    monomial: Vec<Vec<f64>>,
    derivative: Vec<Vec<f64>>,
}

impl fmt::Debug for LSBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LSBasis").field("id", &self.id).finish_non_exhaustive()
    }
}

impl PartialEq for LSBasis {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// Sobolev Gram matrix of `L_0 ..= L_n`: `I + mu * D`, where
/// `D[i][j] = int L_i' L_j' ds` in closed form.
pub fn sobolev_gram(n: usize, mu: f64) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; n + 1]; n + 1];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let m = i.min(j);
            let d = if (i + j) % 2 == 0 && m > 0 {
                // L_n' = 2 sqrt(2n+1) sum_{k = n-1, n-3, ..} sqrt(2k+1) L_k and
                // sum_{k = m-1, m-3, ..} (2k + 1) = m (m + 1) / 2
                4.0 * (((2 * i + 1) * (2 * j + 1)) as f64).sqrt() * (m * (m + 1)) as f64 / 2.0
            } else {
                0.0
            };
            *v = if i == j { 1.0 } else { 0.0 } + mu * d;
        }
    }
    g
}

impl LSBasis {
    pub fn build(degree: usize, mu: f64) -> Result<Self> {
        let id = BasisId::new(degree, mu);
        id.validate()?;
        let n = degree + 1;
        let gram = sobolev_gram(degree, mu);
        let inner = |u: &[f64], v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for (i, &ui) in u.iter().enumerate() {
                if ui == 0.0 {
                    continue;
                }
                acc += ui * gram[i].iter().zip(v).map(|(g, vj)| g * vj).sum::<f64>();
            }
            acc
        };

        let mut legendre: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            // modified Gram-Schmidt plus one reorthogonalization pass
            for _ in 0..2 {
                for q in &legendre {
                    let r = inner(&v, q);
                    for (vk, qk) in v.iter_mut().zip(q) {
                        *vk -= r * qk;
                    }
                }
            }
            let norm = inner(&v, &v).sqrt();
            for vk in &mut v {
                *vk /= norm;
            }
            v.truncate(i + 1);
            legendre.push(v);
        }

        let monomial: Vec<Vec<f64>> = legendre
            .iter()
            .map(|row| {
                let mut m = vec![0.0; row.len()];
                for (k, &c) in row.iter().enumerate() {
                    for (j, lj) in legendre_monomial(k).into_iter().enumerate() {
                        m[j] += c * lj;
                    }
                }
                m
            })
            .collect();
        let derivative = monomial
            .iter()
            .map(|m| m.iter().enumerate().skip(1).map(|(j, c)| j as f64 * c).collect())
            .collect();

        Ok(Self {
            id,
            legendre,
            monomial,
            derivative,
        })
    }

    /// Returns the process-wide shared instance for `(degree, mu)`, building
    /// it on first use.
    pub fn shared(degree: usize, mu: f64) -> Result<Arc<Self>> {
        static CACHE: OnceLock<RwLock<HashMap<(usize, u64), Arc<LSBasis>>>> = OnceLock::new();
        let id = BasisId::new(degree, mu);
        id.validate()?;
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&id.key()) {
            return Ok(Arc::clone(b));
        }
        let built = Arc::new(Self::build(degree, mu)?);
        let mut w = cache.write().unwrap_or_else(|e| e.into_inner());
        Ok(Arc::clone(w.entry(id.key()).or_insert(built)))
    }

    pub fn shared_id(id: BasisId) -> Result<Arc<Self>> {
        Self::shared(id.degree, id.mu)
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.id.degree
    }

    pub fn mu(&self) -> f64 {
        self.id.mu
    }

    pub fn len(&self) -> usize {
        self.id.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficients of `B_i` over `L_0 ..= L_i`.
    pub fn legendre_coeffs(&self, i: usize) -> &[f64] {
        &self.legendre[i]
    }

    /// Monomial coefficients of `B_i`, lowest power first.
    pub fn basis_coeffs(&self, i: usize) -> &[f64] {
        &self.monomial[i]
    }

    /// Monomial coefficients of `B_i'`, lowest power first.
    pub fn deriv_coeffs(&self, i: usize) -> &[f64] {
        &self.derivative[i]
    }

    /// `B_i` as a standalone polynomial.
    pub fn function(&self, i: usize) -> LegendreSeries {
        let mut c = self.legendre[i].clone();
        c.resize(self.len(), 0.0);
        LegendreSeries::new(c)
    }

    /// Converts basis coefficients `sum_i c_i B_i` to Legendre form.
    pub fn to_legendre(&self, coeffs: &[f64]) -> LegendreSeries {
        assert_eq!(coeffs.len(), self.len(), "coefficient count must match the basis");
        let mut a = vec![0.0; self.len()];
        for (row, &c) in self.legendre.iter().zip(coeffs) {
            for (ak, r) in a.iter_mut().zip(row) {
                *ak += c * r;
            }
        }
        LegendreSeries::new(a)
    }

    /// Basis coefficients of a polynomial of degree at most `d` in Legendre
    /// form. Higher Legendre terms are ignored.
    pub fn from_legendre(&self, series: &LegendreSeries) -> Vec<f64> {
        let n = self.len();
        let a: Vec<f64> = (0..n).map(|k| series.coeffs().get(k).copied().unwrap_or(0.0)).collect();
        let mut c = vec![0.0; n];
        for k in (0..n).rev() {
            let mut acc = a[k];
            for i in k + 1..n {
                acc -= c[i] * self.legendre[i][k];
            }
            c[k] = acc / self.legendre[k][k];
        }
        c
    }

    /// Basis coefficients of the polynomial with the given monomial
    /// coefficients (degree at most `d`).
    pub fn from_monomial(&self, monomial: &[f64]) -> Vec<f64> {
        self.from_legendre(&LegendreSeries::from_monomial(monomial))
    }

    /// Sobolev inner product of two polynomials in Legendre form.
    pub fn sobolev_inner(&self, f: &LegendreSeries, g: &LegendreSeries) -> f64 {
        let n = f.coeffs().len().max(g.coeffs().len());
        let gram = sobolev_gram(n - 1, self.mu());
        let at = |p: &LegendreSeries, k: usize| p.coeffs().get(k).copied().unwrap_or(0.0);
        let mut acc = 0.0;
        for (i, row) in gram.iter().enumerate() {
            let fi = at(f, i);
            if fi == 0.0 {
                continue;
            }
            for (j, gij) in row.iter().enumerate() {
                acc += fi * gij * at(g, j);
            }
        }
        acc
    }
}

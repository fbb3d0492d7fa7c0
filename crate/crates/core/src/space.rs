//! Symbols as points of the coefficient space.
//!
//! A [`SymbolVector`] stores the shape `(x_0..x_d, y_0..y_d)` with
//! `x_0 = y_0 = 0` and unit Euclidean norm, plus the [`Transform`] that maps
//! the normalized curve back to page coordinates. `B_0` is the constant 1, so
//! the removed `x_0, y_0` are exactly the translation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::approx::{project, PlaneCurve, SeriesPair};
use crate::basis::LSBasis;
use crate::error::{Error, Result};
use crate::ink::InkSymbol;

/// Page position of a normalized curve: `page = (tx, ty) + scale * curve`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub tx: f64,
    pub ty: f64,
    pub scale: f64,
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        tx: 0.0,
        ty: 0.0,
        scale: 1.0,
    };

    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (self.tx + self.scale * x, self.ty + self.scale * y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector {
    basis: Arc<LSBasis>,
    coeffs: Vec<f64>,
    pub transform: Transform,
    pub class_label: Option<String>,
}

impl SymbolVector {
    /// Wraps raw coefficients without normalizing them. Used for points on a
    /// homotopy path and for values read back from a catalog.
    pub fn from_parts(
        basis: Arc<LSBasis>,
        coeffs: Vec<f64>,
        transform: Transform,
        class_label: Option<String>,
    ) -> Result<Self> {
        if coeffs.len() != 2 * basis.len() {
            return Err(Error::InvalidArgument(format!(
                "symbol vector needs {} coefficients, got {}",
                2 * basis.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if !(transform.scale > 0.0) || !transform.tx.is_finite() || !transform.ty.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid transform {transform:?}")));
        }
        Ok(Self {
            basis,
            coeffs,
            transform,
            class_label,
        })
    }

    pub fn basis(&self) -> &Arc<LSBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn x_coeffs(&self) -> &[f64] {
        &self.coeffs[..self.basis.len()]
    }

    pub fn y_coeffs(&self) -> &[f64] {
        &self.coeffs[self.basis.len()..]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The normalized curve (no transform applied).
    pub fn curve(&self) -> PlaneCurve {
        PlaneCurve {
            x: self.basis.to_legendre(self.x_coeffs()),
            y: self.basis.to_legendre(self.y_coeffs()),
        }
    }

    /// Page-coordinate point at `s`.
    pub fn page_point(&self, s: f64) -> (f64, f64) {
        self.transform.apply(self.curve().point(s))
    }

    /// Samples the page-space curve at `n >= 2` evenly spaced parameters.
    pub fn sample_page(&self, n: usize) -> Vec<(f64, f64)> {
        let curve = self.curve();
        let n = n.max(2);
        (0..n)
            .map(|k| self.transform.apply(curve.point(k as f64 / (n - 1) as f64)))
            .collect()
    }

    /// Parameter of the curve point nearest to the page-space point `p`:
    /// the best of 1024 even samples, refined by golden-section search on
    /// the neighboring cells.
    pub fn nearest_parameter(&self, p: (f64, f64)) -> f64 {
        const N: usize = 1024;
        let curve = self.curve();
        let dist = |s: f64| {
            let (x, y) = self.transform.apply(curve.point(s));
            (x - p.0).powi(2) + (y - p.1).powi(2)
        };
        let best = (0..=N)
            .map(|k| k as f64 / N as f64)
            .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
            .expect("non-empty grid");
        let h = 1.0 / N as f64;
        let (mut a, mut b) = ((best - h).max(0.0), (best + h).min(1.0));
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..60 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if dist(c) <= dist(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let s = 0.5 * (a + b);
        if dist(s) <= dist(best) {
            s
        } else {
            best
        }
    }

    /// The series in page coordinates.
    pub fn denormalize(&self) -> SeriesPair {
        let t = self.transform;
        let mut x: Vec<f64> = self.x_coeffs().iter().map(|c| t.scale * c).collect();
        let mut y: Vec<f64> = self.y_coeffs().iter().map(|c| t.scale * c).collect();
        x[0] += t.tx;
        y[0] += t.ty;
        SeriesPair::new(Arc::clone(&self.basis), x, y).expect("finite by construction")
    }

    pub(crate) fn ensure_same_basis(&self, other: &SymbolVector) -> Result<()> {
        if self.basis.id() != other.basis.id() {
            return Err(Error::BasisMismatch {
                expected: self.basis.id(),
                found: other.basis.id(),
            });
        }
        Ok(())
    }
}

/// Zeroes `x_0, y_0` and scales the rest to unit norm, recording the
/// translation and scale divided out.
pub fn normalize(series: &SeriesPair) -> Result<SymbolVector> {
    let (x, y) = (series.x_coeffs(), series.y_coeffs());
    let (tx, ty) = (x[0], y[0]);
    let norm = x[1..].iter().chain(&y[1..]).map(|c| c * c).sum::<f64>().sqrt();
    let magnitude = 1f64.max(tx.abs()).max(ty.abs());
    if !(norm > 1e-14 * magnitude) {
        return Err(Error::DegenerateSymbol);
    }
    let mut coeffs = Vec::with_capacity(2 * x.len());
    coeffs.push(0.0);
    coeffs.extend(x[1..].iter().map(|c| c / norm));
    coeffs.push(0.0);
    coeffs.extend(y[1..].iter().map(|c| c / norm));
    Ok(SymbolVector {
        basis: Arc::clone(series.basis()),
        coeffs,
        transform: Transform { tx, ty, scale: norm },
        class_label: None,
    })
}

/// Concatenates, parameterizes, projects and normalizes a symbol. The
/// symbol's label is carried over.
pub fn vectorize(symbol: &InkSymbol, basis: &Arc<LSBasis>) -> Result<SymbolVector> {
    let mut v = normalize(&project(&symbol.trace()?, basis))?;
    v.class_label = symbol.class_label.clone();
    Ok(v)
}

/// Componentwise mean of normalized vectors, rescaled to unit norm. The
/// transform is the mean of the sample transforms.
pub fn average(samples: &[SymbolVector]) -> Result<SymbolVector> {
    let first = samples.first().ok_or(Error::Empty("sample list"))?;
    let n = samples.len() as f64;
    let mut coeffs = vec![0.0; first.coeffs.len()];
    let mut t = Transform {
        tx: 0.0,
        ty: 0.0,
        scale: 0.0,
    };
    for v in samples {
        first.ensure_same_basis(v)?;
        for (a, c) in coeffs.iter_mut().zip(&v.coeffs) {
            *a += c;
        }
        t.tx += v.transform.tx;
        t.ty += v.transform.ty;
        t.scale += v.transform.scale;
    }
    for a in &mut coeffs {
        *a /= n;
    }
    t.tx /= n;
    t.ty /= n;
    t.scale /= n;
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 1e-14) {
        return Err(Error::DegenerateSymbol);
    }
    for a in &mut coeffs {
        *a /= norm;
    }
    // keep the centering exact
    let half = first.basis.len();
    coeffs[0] = 0.0;
    coeffs[half] = 0.0;
    Ok(SymbolVector {
        basis: Arc::clone(&first.basis),
        coeffs,
        transform: t,
        class_label: first.class_label.clone(),
    })
}

/// The homotopy point `(1 - t) * start + t * target`, not renormalized.
/// The transform is interpolated the same way.
pub fn interpolate(start: &SymbolVector, target: &SymbolVector, t: f64) -> Result<SymbolVector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain {
            value: t,
            domain: "[0, 1]",
        });
    }
    start.ensure_same_basis(target)?;
    if t == 0.0 {
        return Ok(start.clone());
    }
    if t == 1.0 {
        return Ok(target.clone());
    }
    let lerp = |a: f64, b: f64| (1.0 - t) * a + t * b;
    let coeffs = start.coeffs.iter().zip(&target.coeffs).map(|(&a, &b)| lerp(a, b)).collect();
    Ok(SymbolVector {
        basis: Arc::clone(&start.basis),
        coeffs,
        transform: Transform {
            tx: lerp(start.transform.tx, target.transform.tx),
            ty: lerp(start.transform.ty, target.transform.ty),
            scale: lerp(start.transform.scale, target.transform.scale),
        },
        class_label: target.class_label.clone(),
    })
}

//! Projection of parameterized traces onto a Legendre-Sobolev basis and
//! evaluation of the resulting coordinate series.

use std::sync::Arc;

use crate::basis::LSBasis;
use crate::error::{Error, Result};
use crate::ink::ParameterizedTrace;
use crate::poly::{legendre_values, LegendreSeries};

/// Coordinate series `x(s) = sum x_i B_i(s)`, `y(s) = sum y_i B_i(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPair {
    basis: Arc<LSBasis>,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// A plane curve in Legendre form, ready for repeated evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurve {
    pub x: LegendreSeries,
    pub y: LegendreSeries,
}

impl PlaneCurve {
    pub fn point(&self, s: f64) -> (f64, f64) {
        (self.x.value(s), self.y.value(s))
    }

    pub fn velocity(&self, s: f64) -> (f64, f64) {
        (self.x.derivative(s), self.y.derivative(s))
    }
}

impl SeriesPair {
    pub fn new(basis: Arc<LSBasis>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = basis.len();
        if x.len() != n || y.len() != n {
            return Err(Error::InvalidArgument(format!(
                "series needs {n} coefficients per coordinate, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite series coefficient".into()));
        }
        Ok(Self { basis, x, y })
    }

    pub fn basis(&self) -> &Arc<LSBasis> {
        &self.basis
    }

    pub fn x_coeffs(&self) -> &[f64] {
        &self.x
    }

    pub fn y_coeffs(&self) -> &[f64] {
        &self.y
    }

    pub fn curve(&self) -> PlaneCurve {
        PlaneCurve {
            x: self.basis.to_legendre(&self.x),
            y: self.basis.to_legendre(&self.y),
        }
    }

    /// Position (`order` 0) or derivative (`order` 1) at `s`.
    pub fn evaluate(&self, s: f64, order: usize) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                value: s,
                domain: "[0, 1]",
            });
        }
        let c = self.curve();
        match order {
            0 => Ok(c.point(s)),
            1 => Ok(c.velocity(s)),
            _ => Err(Error::InvalidArgument(format!("derivative order {order} not supported"))),
        }
    }

    /// Sobolev norm of the series, computed from its Legendre form.
    pub fn sobolev_norm(&self) -> f64 {
        let c = self.curve();
        (self.basis.sobolev_inner(&c.x, &c.x) + self.basis.sobolev_inner(&c.y, &c.y)).sqrt()
    }
}

/// Per-point antiderivative tables for the closed-form segment integrals.
struct Tables {
    // P_k(u), k = 0 ..= d
    p: Vec<f64>,
    // first antiderivative in s of P_k(2s - 1)
    a1: Vec<f64>,
    // second antiderivative in s of P_k(2s - 1)
    a2: Vec<f64>,
}

impl Tables {
    fn at(s: f64, d: usize, scratch: &mut Vec<f64>) -> Self {
        let u = 2.0 * s - 1.0;
        legendre_values(u, d + 2, scratch);
        let p = scratch;
        // Q_k = int P_k du: Q_0 = u, Q_k = (P_{k+1} - P_{k-1}) / (2k + 1)
        let q: Vec<f64> = (0..=d + 1)
            .map(|k| {
                if k == 0 {
                    u
                } else {
                    (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64
                }
            })
            .collect();
        // R_k = int Q_k du: R_0 = u^2 / 2, R_k = (Q_{k+1} - Q_{k-1}) / (2k + 1)
        let r = (0..=d).map(|k| {
            if k == 0 {
                0.5 * u * u
            } else {
                (q[k + 1] - q[k - 1]) / (2 * k + 1) as f64
            }
        });
        // ds = du / 2
        Tables {
            p: p[..=d].to_vec(),
            a1: q[..=d].iter().map(|v| 0.5 * v).collect(),
            a2: r.map(|v| 0.25 * v).collect(),
        }
    }
}

/// Projects a trace onto the basis. Coordinates between trace points are
/// linear in `s`; every segment integral is evaluated in closed form.
pub fn project(trace: &ParameterizedTrace, basis: &Arc<LSBasis>) -> SeriesPair {
    let d = basis.degree();
    let mu = basis.mu();
    let pts = trace.points();
    // <f, L_k> accumulators, before the sqrt(2k + 1) factor
    let mut lx = vec![0.0; d + 1];
    let mut ly = vec![0.0; d + 1];
    let mut scratch = Vec::with_capacity(d + 3);
    let mut prev = Tables::at(pts[0].s, d, &mut scratch);
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let next = Tables::at(b.s, d, &mut scratch);
        let ds = b.s - a.s;
        if ds > 0.0 {
            let mx = (b.x - a.x) / ds;
            let my = (b.y - a.y) / ds;
            for k in 0..=d {
                let da2 = next.a2[k] - prev.a2[k];
                let dp = next.p[k] - prev.p[k];
                // int_a^b f P_k = [f A1]_a^b - m [A2]_a^b ; int f' P_k' = m [P_k]_a^b
                lx[k] += b.x * next.a1[k] - a.x * prev.a1[k] - mx * da2 + mu * mx * dp;
                ly[k] += b.y * next.a1[k] - a.y * prev.a1[k] - my * da2 + mu * my * dp;
            }
        }
        prev = next;
    }
    for k in 0..=d {
        let w = ((2 * k + 1) as f64).sqrt();
        lx[k] *= w;
        ly[k] *= w;
    }
    let coeffs = |l: &[f64]| -> Vec<f64> {
        (0..=d)
            .map(|i| basis.legendre_coeffs(i).iter().zip(l).map(|(c, v)| c * v).sum())
            .collect()
    };
    SeriesPair {
        basis: Arc::clone(basis),
        x: coeffs(&lx),
        y: coeffs(&ly),
    }
}

/// RMS distance between trace points and the series at the same `s`,
/// divided by the trace's bounding-box diagonal.
pub fn reconstruction_error(trace: &ParameterizedTrace, series: &SeriesPair) -> f64 {
    let curve = series.curve();
    let pts = trace.points();
    let sum: f64 = pts
        .iter()
        .map(|p| {
            let (x, y) = curve.point(p.s);
            (x - p.x).powi(2) + (y - p.y).powi(2)
        })
        .sum();
    let rms = (sum / pts.len() as f64).sqrt();
    let diag = trace.bbox_diagonal();
    if diag > 0.0 {
        rms / diag
    } else {
        rms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ink::{parameterize, Point, TracePoint};

    fn line_trace(n: usize, f: impl Fn(f64) -> (f64, f64)) -> ParameterizedTrace {
        let pts = (0..n)
            .map(|k| {
                let s = if k == n - 1 { 1.0 } else { k as f64 / (n - 1) as f64 };
                let (x, y) = f(s);
                TracePoint { s, x, y }
            })
            .collect();
        ParameterizedTrace::new(pts, 1.0).unwrap()
    }

    #[test]
    fn constant_projects_onto_b0() {
        let basis = LSBasis::shared(8, 0.0).unwrap();
        let trace = line_trace(200, |s| (1.0, s));
        let series = project(&trace, &basis);
        assert!((series.x_coeffs()[0] - 1.0).abs() < 1e-13);
        assert!(series.x_coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn identity_coefficients() {
        let basis = LSBasis::shared(8, 0.0).unwrap();
        let trace = line_trace(64, |s| (s, 0.0));
        let series = project(&trace, &basis);
        let x = series.x_coeffs();
        assert!((x[0] - 0.5).abs() < 1e-14);
        assert!((x[1] - 3f64.sqrt() / 6.0).abs() < 1e-14);
        assert!(x[2..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn straight_stroke_reconstructs_exactly() {
        let basis = LSBasis::shared(12, 0.125).unwrap();
        let trace = parameterize(&[Point::new(2.0, 1.0), Point::new(5.0, 5.0), Point::new(8.0, 9.0)]).unwrap();
        let series = project(&trace, &basis);
        assert!(reconstruction_error(&trace, &series) < 1e-12);
        let (x, y) = series.evaluate(0.5, 0).unwrap();
        assert!((x - 5.0).abs() < 1e-12 && (y - 5.0).abs() < 1e-12);
        let (dx, dy) = series.evaluate(0.3, 1).unwrap();
        assert!((dx - 6.0).abs() < 1e-11 && (dy - 8.0).abs() < 1e-11);
    }

    #[test]
    fn evaluate_rejects_out_of_domain() {
        let basis = LSBasis::shared(4, 0.0).unwrap();
        let series = SeriesPair::new(basis, vec![0.0; 5], vec![0.0; 5]).unwrap();
        assert!(matches!(series.evaluate(1.5, 0), Err(Error::Domain { .. })));
        assert!(matches!(series.evaluate(-0.1, 1), Err(Error::Domain { .. })));
        assert_eq!(series.evaluate(0.7, 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn coefficient_count_checked() {
        let basis = LSBasis::shared(4, 0.0).unwrap();
        assert!(SeriesPair::new(basis, vec![0.0; 4], vec![0.0; 5]).is_err());
    }
}

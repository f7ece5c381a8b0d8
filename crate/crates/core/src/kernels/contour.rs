use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Node doubling schedule for circle quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOptions {
    pub tol: f64,
    pub initial_nodes: usize,
    pub max_doublings: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            initial_nodes: 256,
            max_doublings: 6,
        }
    }
}

/// Positively oriented circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ContourValue {
    pub value: Complex64,
    pub nodes: usize,
    /// Largest `|f(z) (z - c)|` seen on the final node set.
    pub max_integrand: f64,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn encloses(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn node(&self, k: usize, n: usize) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, TAU * k as f64 / n as f64)
    }

    /// `(1 / 2 pi i) * integral of f` with `n` equally spaced nodes.
    pub fn trapezoid<F: Fn(Complex64) -> Complex64>(&self, n: usize, f: F) -> Complex64 {
        let raw: Complex64 = (0..n)
            .map(|k| {
                let z = self.node(k, n);
                f(z) * (z - self.center)
            })
            .sum();
        raw / n as f64
    }

    /// Trapezoid rule with node doubling until the relative change drops
    /// below `opts.tol`. Each doubling only evaluates the new midpoints.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, opts: &QuadratureOptions, f: F) -> Result<ContourValue> {
        let mut n = opts.initial_nodes.max(4);
        let mut max_integrand = 0.0f64;
        let mut raw = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let z = self.node(k, n);
            let term = f(z) * (z - self.center);
            max_integrand = max_integrand.max(term.norm());
            raw += term;
        }
        let mut value = raw / n as f64;
        let mut last_change = f64::INFINITY;
        for _ in 0..=opts.max_doublings {
            let fine_n = 2 * n;
            for k in 0..n {
                let z = self.node(2 * k + 1, fine_n);
                let term = f(z) * (z - self.center);
                max_integrand = max_integrand.max(term.norm());
                raw += term;
            }
            let fine = raw / fine_n as f64;
            let change = (fine - value).norm();
            n = fine_n;
            value = fine;
            last_change = change / fine.norm().max(f64::MIN_POSITIVE);
            if change <= opts.tol * fine.norm() + roundoff_floor(max_integrand) {
                return Ok(ContourValue {
                    value,
                    nodes: n,
                    max_integrand,
                });
            }
        }
        Err(Error::NonConvergence {
            nodes: n,
            last_change,
            tol: opts.tol,
        })
    }
}

/// Change between two trapezoid sums that is indistinguishable from
/// round-off, given the size of the largest summand.
pub(crate) fn roundoff_floor(magnitude: f64) -> f64 {
    256.0 * f64::EPSILON * magnitude
}

/// Real part of a contour value, insisting the imaginary part is round-off.
pub(crate) fn real_part(v: Complex64) -> Result<f64> {
    let residue = v.im.abs();
    if residue > 1e-8 * v.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue { residue, value: v.re });
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_of_simple_pole() {
        let c = Contour::new(Complex64::new(1.0, 0.5), 0.3);
        let v = c
            .integrate(&QuadratureOptions::default(), |z| {
                (2.0 * z).exp() / (z - Complex64::new(1.0, 0.5))
            })
            .unwrap();
        let exact = (2.0 * Complex64::new(1.0, 0.5)).exp();
        assert!((v.value - exact).norm() < 1e-12);
    }

    #[test]
    fn excluded_pole_contributes_nothing() {
        let c = Contour::new(Complex64::new(0.0, 0.0), 1.0);
        assert!(!c.encloses(Complex64::new(3.0, 0.0)));
        let v = c.integrate(&QuadratureOptions::default(), |z| 1.0 / (z - 3.0)).unwrap();
        assert!(v.value.norm() < 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let c = Contour::new(Complex64::new(0.0, 0.0), 1.0);
        let opts = QuadratureOptions {
            tol: 1e-14,
            initial_nodes: 4,
            max_doublings: 1,
        };
        // essential singularity with a huge coefficient resolves slowly
        let err = c.integrate(&opts, |z| (40.0 / z).exp()).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}

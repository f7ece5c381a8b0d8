//! Continuum Riemann function of the telegraph operator
//! `d_xy + beta2 d_x + beta1 d_y`, as a contour integral around `-beta1`.

use num_complex::Complex64;

use super::contour::{real_part, roundoff_floor, Contour, QuadratureOptions};
use crate::error::{Error, Result};
use crate::params::check_rates;

/// Circle around `-beta1` that keeps clear of `-beta2` and the origin.
pub fn continuum_contour(beta1: f64, beta2: f64) -> Contour {
    let radius = ((beta1 - beta2).abs() / 2.0).min(beta1 / 2.0);
    Contour::new(Complex64::new(-beta1, 0.0), radius)
}

/// Integrand pieces at `z`: `(measure, x-exponent, y-exponent)` so that the
/// kernel is `measure * exp(x * ax + y * ay)` and each `d_x` (`d_y`)
/// multiplies by `ax` (`ay`).
#[inline]
fn pieces(beta1: f64, beta2: f64, z: Complex64) -> (Complex64, Complex64, Complex64) {
    let delta = beta1 - beta2;
    let zb1 = z + beta1;
    let zb2 = z + beta2;
    let measure = (beta2 - beta1) / (zb1 * zb2);
    let ax = -delta * z / zb2;
    let ay = delta * z / zb1;
    (measure, ax, ay)
}

/// `d_x^k1 d_y^k2 R(x, y)` for `x, y >= 0`.
pub fn riemann_continuum_deriv(
    beta1: f64,
    beta2: f64,
    order: (u32, u32),
    x: f64,
    y: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    check_rates(beta1, beta2)?;
    if x < 0.0 || y < 0.0 {
        return Err(Error::OutOfWindow { x, y });
    }
    let contour = continuum_contour(beta1, beta2);
    let v = contour.integrate(opts, |z| {
        let (m, ax, ay) = pieces(beta1, beta2, z);
        m * (x * ax + y * ay).exp() * ax.powi(order.0 as i32) * ay.powi(order.1 as i32)
    })?;
    real_part(v.value)
}

pub fn riemann_continuum(beta1: f64, beta2: f64, x: f64, y: f64, opts: &QuadratureOptions) -> Result<f64> {
    riemann_continuum_deriv(beta1, beta2, (0, 0), x, y, opts)
}

/// `R(x, y) 1{x >= 0} 1{y >= 0}`.
pub fn riemann_truncated(beta1: f64, beta2: f64, x: f64, y: f64, opts: &QuadratureOptions) -> Result<f64> {
    if x < 0.0 || y < 0.0 {
        Ok(0.0)
    } else {
        riemann_continuum(beta1, beta2, x, y, opts)
    }
}

/// Value and first derivatives of `R` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KernelJet {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
}

/// `R` on a fixed node set, for bulk evaluation on `[0, x_max] x [0, y_max]`.
///
/// The node count is chosen once by doubling until the probe values at the
/// far corners settle, then doubled again. Nodes come in conjugate pairs, so
/// only the upper half circle is stored.
#[derive(Debug, Clone)]
pub struct ContinuumKernel {
    beta1: f64,
    beta2: f64,
    nodes: usize,
    weights: Vec<Complex64>,
    ax: Vec<Complex64>,
    ay: Vec<Complex64>,
}

impl ContinuumKernel {
    pub fn new(beta1: f64, beta2: f64, x_max: f64, y_max: f64, opts: &QuadratureOptions) -> Result<Self> {
        check_rates(beta1, beta2)?;
        let probes = [(x_max, 0.0), (0.0, y_max), (x_max, y_max), (0.5 * x_max, 0.5 * y_max)];
        let orders = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];
        let mut n = opts.initial_nodes.max(8);
        let mut coarse = Self::with_nodes(beta1, beta2, n);
        let mut last_change = f64::INFINITY;
        for _ in 0..=opts.max_doublings {
            let fine = Self::with_nodes(beta1, beta2, 2 * n);
            let mut worst = 0.0f64;
            for &(x, y) in &probes {
                for &k in &orders {
                    let a = coarse.deriv(k, x, y);
                    let b = fine.deriv(k, x, y);
                    let excess = (a - b).abs() - roundoff_floor(fine.magnitude(k, x, y));
                    worst = worst.max(excess.max(0.0) / b.abs().max(f64::MIN_POSITIVE));
                }
            }
            last_change = worst;
            n *= 2;
            if worst <= opts.tol {
                return Ok(Self::with_nodes(beta1, beta2, 2 * n));
            }
            coarse = fine;
        }
        Err(Error::NonConvergence {
            nodes: n,
            last_change,
            tol: opts.tol,
        })
    }

    /// Kernel on exactly `n` trapezoid nodes (`n` even).
    pub fn with_nodes(beta1: f64, beta2: f64, n: usize) -> Self {
        let contour = continuum_contour(beta1, beta2);
        let half = n / 2;
        let mut weights = Vec::with_capacity(half + 1);
        let mut ax = Vec::with_capacity(half + 1);
        let mut ay = Vec::with_capacity(half + 1);
        for k in 0..=half {
            let z = contour.node(k, n);
            let (m, a, b) = pieces(beta1, beta2, z);
            let multiplicity = if k == 0 || k == half { 1.0 } else { 2.0 };
            weights.push(m * (z - contour.center) * (multiplicity / n as f64));
            ax.push(a);
            ay.push(b);
        }
        Self {
            beta1,
            beta2,
            nodes: n,
            weights,
            ax,
            ay,
        }
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.deriv((0, 0), x, y)
    }

    pub fn truncated(&self, x: f64, y: f64) -> f64 {
        if x < 0.0 || y < 0.0 {
            0.0
        } else {
            self.value(x, y)
        }
    }

    pub fn deriv(&self, order: (u32, u32), x: f64, y: f64) -> f64 {
        let (k1, k2) = (order.0 as i32, order.1 as i32);
        let mut acc = 0.0;
        for i in 0..self.weights.len() {
            let e = (x * self.ax[i] + y * self.ay[i]).exp();
            acc += (self.weights[i] * e * self.ax[i].powi(k1) * self.ay[i].powi(k2)).re;
        }
        acc
    }

    /// Sum of the absolute summands of [`ContinuumKernel::deriv`].
    pub fn magnitude(&self, order: (u32, u32), x: f64, y: f64) -> f64 {
        let (k1, k2) = (order.0 as i32, order.1 as i32);
        let mut acc = 0.0;
        for i in 0..self.weights.len() {
            let e = (x * self.ax[i] + y * self.ay[i]).exp();
            acc += (self.weights[i] * e * self.ax[i].powi(k1) * self.ay[i].powi(k2)).norm();
        }
        acc
    }

    /// Several derivatives at one point, sharing the exponentials.
    pub fn derivs(&self, orders: &[(u32, u32)], x: f64, y: f64) -> Vec<f64> {
        let mut out = vec![0.0; orders.len()];
        for i in 0..self.weights.len() {
            let t = self.weights[i] * (x * self.ax[i] + y * self.ay[i]).exp();
            for (slot, &(k1, k2)) in out.iter_mut().zip(orders) {
                *slot += (t * self.ax[i].powi(k1 as i32) * self.ay[i].powi(k2 as i32)).re;
            }
        }
        out
    }

    pub fn jet(&self, x: f64, y: f64) -> KernelJet {
        let mut jet = KernelJet::default();
        for i in 0..self.weights.len() {
            let t = self.weights[i] * (x * self.ax[i] + y * self.ay[i]).exp();
            jet.value += t.re;
            jet.dx += (t * self.ax[i]).re;
            jet.dy += (t * self.ay[i]).re;
        }
        jet
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const OPTS: QuadratureOptions = QuadratureOptions {
        tol: 1e-12,
        initial_nodes: 256,
        max_doublings: 6,
    };

    #[test]
    fn residue_values_on_axes() {
        assert_abs_diff_eq!(
            riemann_continuum(2.0, 1.0, 0.0, 0.0, &OPTS).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            riemann_continuum(2.0, 1.0, 0.7, 0.0, &OPTS).unwrap(),
            (-1.4f64).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            riemann_continuum(2.0, 1.0, 0.0, 0.3, &OPTS).unwrap(),
            (-0.3f64).exp(),
            epsilon = 1e-12
        );
        // beta1 < beta2 uses the other radius branch
        assert_abs_diff_eq!(
            riemann_continuum(0.5, 3.0, 0.0, 1.1, &OPTS).unwrap(),
            (-3.3f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn brute_force_oracle_with_four_times_the_nodes() {
        let (b1, b2) = (2.0, 1.0);
        let contour = continuum_contour(b1, b2);
        for &(x, y) in &[(0.0, 0.3), (0.5, 0.5), (1.7, 0.2), (2.0, 2.0)] {
            let brute = contour.trapezoid(4 * 256 * 4, |z| {
                let (m, ax, ay) = pieces(b1, b2, z);
                m * (x * ax + y * ay).exp()
            });
            let v = riemann_continuum(b1, b2, x, y, &OPTS).unwrap();
            assert_abs_diff_eq!(v, brute.re, epsilon = 1e-11);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let (b1, b2, h) = (2.0, 1.0, 1e-4);
        let r = |x, y| riemann_continuum(b1, b2, x, y, &OPTS).unwrap();
        let dx = riemann_continuum_deriv(b1, b2, (1, 0), 0.5, 0.5, &OPTS).unwrap();
        let fd = (r(0.5 + h, 0.5) - r(0.5 - h, 0.5)) / (2.0 * h);
        assert_abs_diff_eq!(dx, fd, epsilon = 1e-6);
        let dy = riemann_continuum_deriv(b1, b2, (0, 1), 0.5, 0.5, &OPTS).unwrap();
        let fd = (r(0.5, 0.5 + h) - r(0.5, 0.5 - h)) / (2.0 * h);
        assert_abs_diff_eq!(dy, fd, epsilon = 1e-6);
        assert_eq!(
            riemann_continuum_deriv(b1, b2, (0, 0), 0.5, 0.5, &OPTS).unwrap(),
            r(0.5, 0.5)
        );
    }

    #[test]
    fn solves_the_telegraph_equation() {
        let (b1, b2) = (2.0, 1.0);
        for &(x, y) in &[(0.3, 0.4), (1.0, 1.0), (1.8, 0.1)] {
            let d = |k| riemann_continuum_deriv(b1, b2, k, x, y, &OPTS).unwrap();
            let residual = d((1, 1)) + b2 * d((1, 0)) + b1 * d((0, 1));
            assert!(residual.abs() < 1e-9, "{residual}");
        }
    }

    #[test]
    fn derivatives_bounded_on_compact() {
        let kernel = ContinuumKernel::new(2.0, 1.0, 2.0, 2.0, &OPTS).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=20 {
            for j in 0..=20 {
                let (x, y) = (0.1 * i as f64, 0.1 * j as f64);
                for k in [(1, 1), (2, 0), (0, 2)] {
                    worst = worst.max(kernel.deriv(k, x, y).abs());
                }
            }
        }
        assert!(worst.is_finite() && worst < 50.0, "{worst}");
    }

    #[test]
    fn bulk_kernel_matches_adaptive() {
        let kernel = ContinuumKernel::new(2.0, 1.0, 2.0, 2.0, &OPTS).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.4, 1.3), (2.0, 2.0)] {
            let a = riemann_continuum(2.0, 1.0, x, y, &OPTS).unwrap();
            assert_abs_diff_eq!(kernel.value(x, y), a, epsilon = 1e-11);
            let jet = kernel.jet(x, y);
            assert_abs_diff_eq!(jet.dx, kernel.deriv((1, 0), x, y), epsilon = 1e-12);
        }
        assert_eq!(kernel.truncated(-0.1, 0.5), 0.0);
    }

    #[test]
    fn contour_invariance() {
        let (b1, b2) = (2.0, 1.0);
        let base = continuum_contour(b1, b2);
        for scale in [0.5, 0.8] {
            let c = Contour::new(base.center, base.radius * scale);
            let v = c
                .integrate(&OPTS, |z| {
                    let (m, ax, ay) = pieces(b1, b2, z);
                    m * (0.8 * ax + 0.6 * ay).exp()
                })
                .unwrap();
            let reference = riemann_continuum(b1, b2, 0.8, 0.6, &OPTS).unwrap();
            assert_abs_diff_eq!(v.value.re, reference, epsilon = 1e-9);
        }
    }
}

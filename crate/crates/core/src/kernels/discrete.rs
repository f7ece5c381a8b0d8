//! Discrete Riemann function: a contour integral (oracle) and the exact
//! four-point recurrence (production path).

use num_complex::Complex64;

use super::contour::{real_part, Contour, QuadratureOptions};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Coefficients of `f(x+1, y+1) = x_lag f(x, y+1) + y_lag f(x+1, y) + diag f(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoefficients {
    pub x_lag: f64,
    pub y_lag: f64,
    pub diag: f64,
}

impl RecurrenceCoefficients {
    pub fn from_params(params: &ModelParams) -> Self {
        let (b1, b2) = (params.b1(), params.b2());
        Self {
            x_lag: b1,
            y_lag: b2,
            diag: 1.0 - b1 - b2,
        }
    }

    #[inline]
    pub fn propagate(&self, west: f64, south: f64, south_west: f64) -> f64 {
        self.x_lag * west + self.y_lag * south + self.diag * south_west
    }
}

/// Circle around the enclosed pole `-1 / (b2 (1 - b1))`, radius half the
/// distance to the excluded pole `-1 / (b1 (1 - b2))`.
pub fn discrete_contour(params: &ModelParams) -> Contour {
    let (b1, b2) = (params.b1(), params.b2());
    let inside = -1.0 / (b2 * (1.0 - b1));
    let outside = -1.0 / (b1 * (1.0 - b2));
    Contour::new(Complex64::new(inside, 0.0), 0.5 * (inside - outside).abs())
}

/// Dynamic range beyond which the quadrature result is not trusted.
const PRECISION_RANGE: f64 = 1e12;

/// `R^d(x, y)` by trapezoid quadrature of its contour integral.
pub fn riemann_discrete_quadrature(params: &ModelParams, x: u32, y: u32, opts: &QuadratureOptions) -> Result<f64> {
    let (b1, b2) = (params.b1(), params.b2());
    let contour = discrete_contour(params);
    let v = contour.integrate(opts, |z| {
        let den_in = 1.0 + b2 * (1.0 - b1) * z;
        let den_out = 1.0 + b1 * (1.0 - b2) * z;
        let a = (1.0 + b1 * (1.0 - b1) * z) / den_in;
        let b = (1.0 + b2 * (1.0 - b2) * z) / den_out;
        a.powi(x as i32) * b.powi(y as i32) * (b2 - b1) / (den_in * den_out)
    })?;
    if v.max_integrand > PRECISION_RANGE * v.value.norm() {
        return Err(Error::PrecisionLoss {
            max_integrand: v.max_integrand,
            result: v.value.re,
        });
    }
    real_part(v.value)
}

/// `R^d` on `0..=X` by `0..=Y`, built by the four-point recurrence from the
/// boundary rows `R^d(x, 0) = b1^x`, `R^d(0, y) = b2^y`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    x_extent: usize,
    y_extent: usize,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn build(params: &ModelParams, x_extent: usize, y_extent: usize) -> Self {
        Self::build_with(
            RecurrenceCoefficients::from_params(params),
            params.b1(),
            params.b2(),
            x_extent,
            y_extent,
        )
    }

    pub(crate) fn build_with(
        coeffs: RecurrenceCoefficients,
        row_ratio: f64,
        column_ratio: f64,
        x_extent: usize,
        y_extent: usize,
    ) -> Self {
        let w = x_extent + 1;
        let mut values = vec![0.0; w * (y_extent + 1)];
        values[0] = 1.0;
        for x in 1..=x_extent {
            values[x] = values[x - 1] * row_ratio;
        }
        for y in 1..=y_extent {
            values[y * w] = values[(y - 1) * w] * column_ratio;
            for x in 1..=x_extent {
                values[y * w + x] = coeffs.propagate(
                    values[y * w + x - 1],
                    values[(y - 1) * w + x],
                    values[(y - 1) * w + x - 1],
                );
            }
        }
        Self {
            x_extent,
            y_extent,
            values,
        }
    }

    pub fn x_extent(&self) -> usize {
        self.x_extent
    }

    pub fn y_extent(&self) -> usize {
        self.y_extent
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * (self.x_extent + 1) + x]
    }

    /// `R^d(x, y) 1{x >= 0} 1{y >= 0}`.
    pub fn truncated(&self, x: i64, y: i64) -> f64 {
        if x < 0 || y < 0 {
            0.0
        } else {
            self.get(x as usize, y as usize)
        }
    }

    /// Forward difference `nabla_x^k1 nabla_y^k2 R^d(x, y)`; needs
    /// `x + k1 <= X` and `y + k2 <= Y`.
    pub fn difference(&self, order: (u32, u32), x: usize, y: usize) -> f64 {
        let (k1, k2) = (order.0 as usize, order.1 as usize);
        let mut acc = 0.0;
        for i in 0..=k1 {
            for j in 0..=k2 {
                let sign = if (k1 - i + k2 - j) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binomial(k1, i) * binomial(k2, j) * self.get(x + i, y + j);
            }
        }
        acc
    }

    /// Largest recurrence defect over the interior; exactly zero for a table
    /// built by [`KernelTable::build`], so this is for tables of other origin.
    pub fn recurrence_residual(&self, coeffs: &RecurrenceCoefficients) -> f64 {
        let mut worst = 0.0f64;
        for y in 0..self.y_extent {
            for x in 0..self.x_extent {
                let r =
                    self.get(x + 1, y + 1) - coeffs.propagate(self.get(x, y + 1), self.get(x + 1, y), self.get(x, y));
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// Table filled by quadrature at every node (the independent route).
    pub fn from_quadrature(
        params: &ModelParams,
        x_extent: usize,
        y_extent: usize,
        opts: &QuadratureOptions,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity((x_extent + 1) * (y_extent + 1));
        for y in 0..=y_extent {
            for x in 0..=x_extent {
                values.push(riemann_discrete_quadrature(params, x as u32, y as u32, opts)?);
            }
        }
        Ok(Self {
            x_extent,
            y_extent,
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

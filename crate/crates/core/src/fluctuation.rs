//! Predicted Gaussian limit: the covariance
//! `Lambda_ij = int R(x_i - s, y_i - t) R(x_j - s, y_j - t) D(s, t) ds dt`
//! of the field `U`, a discretised sampler for `U`, and the height transform
//! `U / ((beta1 - beta2) Phi)`.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ContinuumKernel, QuadratureOptions};
use crate::rng::{replica_rng, Stream};
use crate::telegraph::{noise_intensity, TelegraphProblem};

/// Where `D` comes from.
#[derive(Debug, Clone)]
pub enum IntensitySource {
    Constant(f64),
    Telegraph(Arc<TelegraphProblem>),
}

impl IntensitySource {
    /// `D(x, y)`; small negative values clamp to zero, larger ones fail.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            IntensitySource::Constant(c) => Ok(*c),
            IntensitySource::Telegraph(p) => {
                let jet = p.eval(x, y)?;
                let d = noise_intensity(p.beta1(), p.beta2(), &jet);
                let scale = jet.phi.abs() * (jet.dx.abs() + jet.dy.abs()) + (jet.dx * jet.dy).abs();
                if d < -1e-8 * scale.max(1.0) {
                    return Err(Error::NegativeIntensity { x, y, value: d });
                }
                Ok(d.max(0.0))
            }
        }
    }

    /// `Phi(x, y)`; identically one for a constant source.
    pub fn phi(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            IntensitySource::Constant(_) => Ok(1.0),
            IntensitySource::Telegraph(p) => Ok(p.eval(x, y)?.phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CovarianceOptions {
    pub gauss_order: usize,
    /// Panels per axis on the first pass; doubled on each refinement.
    pub initial_panels: usize,
    pub max_refinements: u32,
    pub rel_tol: f64,
    /// Eigenvalues below `-psd_tol * max(1, |largest|)` are fatal.
    pub psd_tol: f64,
}

impl Default for CovarianceOptions {
    fn default() -> Self {
        Self {
            gauss_order: 8,
            initial_panels: 2,
            max_refinements: 5,
            rel_tol: 1e-4,
            psd_tol: 1e-8,
        }
    }
}

/// A covariance matrix (row-major) with its quadrature record.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceMatrix {
    pub points: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub panels: usize,
    /// Relative change on the last refinement.
    pub last_change: f64,
    pub min_eigenvalue: f64,
}

impl CovarianceMatrix {
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim() + j]
    }
}

/// Smallest eigenvalue of a symmetric row-major matrix, failing if it is
/// negative beyond `tol` relative to the spectrum.
pub fn check_psd(values: &[f64], n: usize, tol: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let m = DMatrix::from_row_slice(n, n, values);
    let eig = SymmetricEigen::new(m).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if min < -tol * max.max(1.0) {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
    }
    Ok(min)
}

/// Kernel, intensity and quadrature settings for the limit field.
#[derive(Debug, Clone)]
pub struct FluctuationModel {
    beta1: f64,
    beta2: f64,
    kernel: ContinuumKernel,
    intensity: IntensitySource,
    options: CovarianceOptions,
}

impl FluctuationModel {
    pub fn new(
        beta1: f64,
        beta2: f64,
        intensity: IntensitySource,
        extent: (f64, f64),
        contour: &QuadratureOptions,
        options: CovarianceOptions,
    ) -> Result<Self> {
        let kernel = match &intensity {
            IntensitySource::Telegraph(p) => p.kernel().clone(),
            IntensitySource::Constant(_) => ContinuumKernel::new(beta1, beta2, extent.0, extent.1, contour)?,
        };
        Ok(Self {
            beta1,
            beta2,
            kernel,
            intensity,
            options,
        })
    }

    /// Model driven by the intensity of a telegraph solution.
    pub fn from_problem(problem: Arc<TelegraphProblem>, options: CovarianceOptions) -> Self {
        Self {
            beta1: problem.beta1(),
            beta2: problem.beta2(),
            kernel: problem.kernel().clone(),
            intensity: IntensitySource::Telegraph(problem),
            options,
        }
    }

    pub fn intensity(&self) -> &IntensitySource {
        &self.intensity
    }

    pub fn kernel(&self) -> &ContinuumKernel {
        &self.kernel
    }

    fn gauss(&self) -> Result<Vec<(f64, f64)>> {
        let order = NonZeroUsize::new(self.options.gauss_order)
            .ok_or_else(|| Error::InvalidParameter("Gauss-Legendre order must be positive".into()))?;
        Ok(GaussLegendre::new(order).as_node_weight_pairs().to_vec())
    }

    /// One tensor composite rule with `panels` per axis, for every pair
    /// `i <= j` over its common rectangle.
    fn covariance_pass(&self, points: &[(f64, f64)], gauss: &[(f64, f64)], panels: usize) -> Result<Vec<f64>> {
        let n = points.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let entries: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (xi, yi) = points[i];
                let (xj, yj) = points[j];
                let (xm, ym) = (xi.min(xj), yi.min(yj));
                if xm <= 0.0 || ym <= 0.0 {
                    return Ok(0.0);
                }
                let nodes_x = composite(gauss, xm, panels);
                let nodes_y = composite(gauss, ym, panels);
                let mut acc = 0.0;
                for &(s, ws) in &nodes_x {
                    for &(t, wt) in &nodes_y {
                        let d = self.intensity.eval(s, t)?;
                        if d == 0.0 {
                            continue;
                        }
                        let ri = self.kernel.value(xi - s, yi - t);
                        let rj = if i == j { ri } else { self.kernel.value(xj - s, yj - t) };
                        acc += ws * wt * ri * rj * d;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; n * n];
        for (&(i, j), v) in pairs.iter().zip(entries) {
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
        Ok(out)
    }

    /// `Lambda` at `points`, refined until the relative change is below
    /// `rel_tol`.
    pub fn covariance(&self, points: &[(f64, f64)]) -> Result<CovarianceMatrix> {
        for &(x, y) in points {
            if !(x >= 0.0 && y >= 0.0) {
                return Err(Error::OutOfWindow { x, y });
            }
        }
        let gauss = self.gauss()?;
        let mut panels = self.options.initial_panels.max(1);
        let mut prev = self.covariance_pass(points, &gauss, panels)?;
        let mut last_change = f64::INFINITY;
        for _ in 0..self.options.max_refinements {
            panels *= 2;
            let next = self.covariance_pass(points, &gauss, panels)?;
            let scale = next.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let change = next.iter().zip(&prev).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
            last_change = if scale > 0.0 { change / scale } else { 0.0 };
            prev = next;
            if last_change < self.options.rel_tol {
                let min_eigenvalue = check_psd(&prev, points.len(), self.options.psd_tol)?;
                return Ok(CovarianceMatrix {
                    points: points.to_vec(),
                    values: prev,
                    panels,
                    last_change,
                    min_eigenvalue,
                });
            }
        }
        Err(Error::NonConvergence {
            nodes: panels * self.options.gauss_order,
            last_change,
            tol: self.options.rel_tol,
        })
    }

    /// White-noise discretisation: one cell of side `step` per independent
    /// Gaussian, kernel and intensity taken at the cell midpoint.
    pub fn sampler(&self, points: &[(f64, f64)], step: f64) -> Result<USampler> {
        if !(step > 0.0) {
            return Err(Error::InvalidParameter("white-noise step must be positive".into()));
        }
        let xmax = points.iter().fold(0.0f64, |a, p| a.max(p.0));
        let ymax = points.iter().fold(0.0f64, |a, p| a.max(p.1));
        let (nx, ny) = ((xmax / step).ceil() as usize, (ymax / step).ceil() as usize);
        let cells: Vec<(f64, f64)> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| ((i as f64 + 0.5) * step, (j as f64 + 0.5) * step)))
            .collect();
        let amplitude: Vec<f64> = cells
            .par_iter()
            .map(|&(s, t)| Ok(self.intensity.eval(s, t)?.sqrt() * step))
            .collect::<Result<_>>()?;
        let weights: Vec<Vec<f64>> = points
            .iter()
            .map(|&(x, y)| {
                cells
                    .iter()
                    .zip(&amplitude)
                    .map(|(&(s, t), a)| {
                        if s < x && t < y {
                            a * self.kernel.value(x - s, y - t)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(USampler {
            points: points.to_vec(),
            weights,
        })
    }

    /// Exact covariance of the [`FluctuationModel::sampler`] surrogate.
    pub fn discretized_covariance(&self, points: &[(f64, f64)], step: f64) -> Result<Vec<f64>> {
        Ok(self.sampler(points, step)?.covariance())
    }

    /// `Lambda / ((beta1 - beta2)^2 Phi_i Phi_j)`.
    pub fn height_covariance(&self, lambda: &CovarianceMatrix) -> Result<Vec<f64>> {
        let phis: Vec<f64> = lambda
            .points
            .iter()
            .map(|&(x, y)| self.intensity.phi(x, y))
            .collect::<Result<_>>()?;
        covariance_height(&lambda.values, &lambda.points, &phis, self.beta1, self.beta2)
    }
}

/// `Lambda_ij / ((beta1 - beta2)^2 Phi_i Phi_j)`.
pub fn covariance_height(
    lambda: &[f64],
    points: &[(f64, f64)],
    phis: &[f64],
    beta1: f64,
    beta2: f64,
) -> Result<Vec<f64>> {
    let n = phis.len();
    for (k, &p) in phis.iter().enumerate() {
        if !(p.abs() > 1e-12) {
            return Err(Error::DegenerateProfile {
                x: points[k].0,
                y: points[k].1,
                value: p,
            });
        }
    }
    let d2 = (beta1 - beta2).powi(2);
    Ok((0..n * n)
        .map(|k| lambda[k] / (d2 * phis[k / n] * phis[k % n]))
        .collect())
}

fn composite(gauss: &[(f64, f64)], len: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = len / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let a = p as f64 * width;
            gauss
                .iter()
                .map(move |&(t, w)| (a + 0.5 * width * (t + 1.0), 0.5 * width * w))
        })
        .collect()
}

/// Linear map from cell noises to `U` at fixed points.
#[derive(Debug, Clone)]
pub struct USampler {
    points: Vec<(f64, f64)>,
    weights: Vec<Vec<f64>>,
}

impl USampler {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let cells = self.weights.first().map_or(0, Vec::len);
        let mut out = vec![0.0; self.points.len()];
        for c in 0..cells {
            let z: f64 = rng.sample(StandardNormal);
            for (o, w) in out.iter_mut().zip(&self.weights) {
                *o += w[c] * z;
            }
        }
        out
    }

    /// `n` draws; draw `k` uses its own white-noise stream.
    pub fn draws(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        (0..n)
            .into_par_iter()
            .map(|k| self.draw(&mut replica_rng(seed, k as u64, Stream::WhiteNoise)))
            .collect()
    }

    pub fn covariance(&self) -> Vec<f64> {
        let n = self.points.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.weights[i].iter().zip(&self.weights[j]).map(|(a, b)| a * b).sum();
            }
        }
        out
    }
}

//! Discrete-to-continuum kernel convergence under the weak-asymmetry scaling.

use rayon::prelude::*;
use serde::Serialize;

use super::continuum::ContinuumKernel;
use super::contour::QuadratureOptions;
use super::discrete::KernelTable;
use crate::error::Result;
use crate::params::ModelParams;

/// Multi-indices `k` with `|k| <= m`, ordered by total degree.
pub fn multi_indices(max_order: u32) -> Vec<(u32, u32)> {
    (0..=max_order)
        .flat_map(|total| (0..=total).map(move |k1| (k1, total - k1)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub scale: u32,
    pub order: (u32, u32),
    /// `sup |d^k R(x/L, y/L) - L^|k| nabla^k R^d(x, y)|` over `([0, aL] ∩ Z)^2`.
    pub discrepancy: f64,
    /// `sup |L^|k| nabla^k R^d|` over the same set.
    pub discrete_sup: f64,
    /// `sup |d^k R|` over the same (rescaled) points.
    pub continuum_sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub beta1: f64,
    pub beta2: f64,
    pub window: f64,
    pub max_order: u32,
    pub rows: Vec<ConvergenceRow>,
    /// Orders whose discrepancy failed to decrease strictly along the sweep.
    pub non_decreasing: Vec<(u32, u32)>,
}

impl ConvergenceReport {
    pub fn rows_for(&self, order: (u32, u32)) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.order == order)
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.non_decreasing.is_empty()
    }
}

/// Compare `L^|k| nabla^k R^d` against `d^k R` for every `L` in `scales`.
pub fn verify_kernel_convergence(
    beta1: f64,
    beta2: f64,
    scales: &[u32],
    window: f64,
    max_order: u32,
    opts: &QuadratureOptions,
) -> Result<ConvergenceReport> {
    let orders = multi_indices(max_order);
    let kernel = ContinuumKernel::new(beta1, beta2, window, window, opts)?;
    let mut rows = Vec::new();
    for &scale in scales {
        let params = ModelParams::new(scale, beta1, beta2)?;
        let l = params.scale_f64();
        let n = (window * l).floor() as usize;
        let m = max_order as usize;
        let table = KernelTable::build(&params, n + m, n + m);
        let per_row: Vec<Vec<[f64; 3]>> = (0..=n)
            .into_par_iter()
            .map(|y| {
                let mut acc = vec![[0.0f64; 3]; orders.len()];
                for x in 0..=n {
                    let cont = kernel.derivs(&orders, x as f64 / l, y as f64 / l);
                    for (i, &k) in orders.iter().enumerate() {
                        let disc = l.powi((k.0 + k.1) as i32) * table.difference(k, x, y);
                        let slot = &mut acc[i];
                        slot[0] = slot[0].max((cont[i] - disc).abs());
                        slot[1] = slot[1].max(disc.abs());
                        slot[2] = slot[2].max(cont[i].abs());
                    }
                }
                acc
            })
            .collect();
        for (i, &order) in orders.iter().enumerate() {
            let fold = |c: usize| per_row.iter().map(|r| r[i][c]).fold(0.0f64, f64::max);
            rows.push(ConvergenceRow {
                scale,
                order,
                discrepancy: fold(0),
                discrete_sup: fold(1),
                continuum_sup: fold(2),
            });
        }
    }
    let non_decreasing = orders
        .iter()
        .copied()
        .filter(|&k| {
            let seq: Vec<f64> = rows.iter().filter(|r| r.order == k).map(|r| r.discrepancy).collect();
            seq.windows(2).any(|w| w[1] >= w[0])
        })
        .collect();
    Ok(ConvergenceReport {
        beta1,
        beta2,
        window,
        max_order,
        rows,
        non_decreasing,
    })
}

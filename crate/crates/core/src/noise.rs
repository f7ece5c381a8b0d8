//! Discrete noise: the four-point residual of `phi`, the exact Duhamel
//! decomposition `phi = phi_bar + sum R^d xi`, per-vertex conditional
//! moments and the martingale objects built from them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{KernelTable, RecurrenceCoefficients};
use crate::lattice::{AxisProfile, HeightConvention, LatticeSample, VertexCase, VertexType};
use crate::params::ModelParams;

/// Sup-norm bound for the Duhamel reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Real field on the vertex window `0..=X` by `0..=Y`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeField {
    x_extent: usize,
    y_extent: usize,
    values: Vec<f64>,
}

impl LatticeField {
    pub fn zeros(x_extent: usize, y_extent: usize) -> Self {
        Self {
            x_extent,
            y_extent,
            values: vec![0.0; (x_extent + 1) * (y_extent + 1)],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(x_extent: usize, y_extent: usize, mut f: F) -> Self {
        let mut out = Self::zeros(x_extent, y_extent);
        for y in 0..=y_extent {
            for x in 0..=x_extent {
                out.set(x, y, f(x, y));
            }
        }
        out
    }

    pub fn x_extent(&self) -> usize {
        self.x_extent
    }

    pub fn y_extent(&self) -> usize {
        self.y_extent
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * (self.x_extent + 1) + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * (self.x_extent + 1) + x] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |self - other|` over the common window.
    pub fn sup_distance(&self, other: &LatticeField) -> f64 {
        let mut worst = 0.0f64;
        for y in 0..=self.y_extent.min(other.y_extent) {
            for x in 0..=self.x_extent.min(other.x_extent) {
                worst = worst.max((self.get(x, y) - other.get(x, y)).abs());
            }
        }
        worst
    }
}

/// `xi(x, y)` for `x, y >= 1`; the axes hold zeros.
pub fn extract_residuals(sample: &LatticeSample, params: &ModelParams) -> LatticeField {
    extract_residuals_with(sample, &RecurrenceCoefficients::from_params(params))
}

/// Residual under arbitrary recurrence coefficients.
pub fn extract_residuals_with(sample: &LatticeSample, c: &RecurrenceCoefficients) -> LatticeField {
    let (nx, ny) = (sample.x_extent(), sample.y_extent());
    let mut xi = LatticeField::zeros(nx, ny);
    for y in 1..=ny {
        for x in 1..=nx {
            let r =
                sample.phi(x, y) - c.propagate(sample.phi(x - 1, y), sample.phi(x, y - 1), sample.phi(x - 1, y - 1));
            xi.set(x, y, r);
        }
    }
    xi
}

/// `phi_bar` from the axis data by direct summation against `R^d`:
/// `phi(0,0) R(x,y) + sum_y' R(x, y-y') (phi(0,y') - b2 phi(0,y'-1))
///  + sum_x' R(x-x', y) (phi(x',0) - b1 phi(x'-1,0))`.
pub fn mean_field(
    axis: &AxisProfile,
    table: &KernelTable,
    b1: f64,
    b2: f64,
    x_extent: usize,
    y_extent: usize,
) -> Result<LatticeField> {
    if axis.bottom.len() <= x_extent || axis.left.len() <= y_extent {
        return Err(Error::InvalidBoundary("axis profile shorter than the window".into()));
    }
    if table.x_extent() < x_extent || table.y_extent() < y_extent {
        return Err(Error::InvalidParameter("kernel table smaller than the window".into()));
    }
    let phi00 = axis.bottom[0];
    let g: Vec<f64> = (0..=y_extent)
        .map(|y| {
            if y == 0 {
                0.0
            } else {
                axis.left[y] - b2 * axis.left[y - 1]
            }
        })
        .collect();
    let f: Vec<f64> = (0..=x_extent)
        .map(|x| {
            if x == 0 {
                0.0
            } else {
                axis.bottom[x] - b1 * axis.bottom[x - 1]
            }
        })
        .collect();
    Ok(LatticeField::from_fn(x_extent, y_extent, |x, y| {
        let mut acc = phi00 * table.get(x, y);
        for yp in 1..=y {
            acc += table.get(x, y - yp) * g[yp];
        }
        for xp in 1..=x {
            acc += table.get(x - xp, y) * f[xp];
        }
        acc
    }))
}

/// `sum_{x' <= x, y' <= y} R^d(x - x', y - y') xi(x', y')` at one site.
pub fn duhamel_at(xi: &LatticeField, table: &KernelTable, x: usize, y: usize) -> f64 {
    let mut acc = 0.0;
    for yp in 1..=y {
        for xp in 1..=x {
            acc += table.get(x - xp, y - yp) * xi.get(xp, yp);
        }
    }
    acc
}

/// Full convolution of `xi` with the truncated kernel.
pub fn reconstruct_u(xi: &LatticeField, table: &KernelTable) -> LatticeField {
    LatticeField::from_fn(xi.x_extent(), xi.y_extent(), |x, y| duhamel_at(xi, table, x, y))
}

/// Duhamel decomposition of one sample.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseDecomposition {
    pub xi: LatticeField,
    pub phi_bar: LatticeField,
    /// `phi - phi_bar`.
    pub u: LatticeField,
    /// `sum R^d xi`.
    pub reconstructed: LatticeField,
    /// `sup |u - reconstructed|`.
    pub exactness: f64,
}

/// Decompose `sample` with the mean field of its own axis data; fails if the
/// reconstruction is off by more than [`RECONSTRUCTION_TOL`].
pub fn decompose(sample: &LatticeSample, params: &ModelParams, table: &KernelTable) -> Result<NoiseDecomposition> {
    decompose_with(
        sample,
        &RecurrenceCoefficients::from_params(params),
        table,
        params.b1(),
        params.b2(),
    )
}

/// As [`decompose`] with explicit residual coefficients (the kernel table
/// is used as given).
pub fn decompose_with(
    sample: &LatticeSample,
    coeffs: &RecurrenceCoefficients,
    table: &KernelTable,
    b1: f64,
    b2: f64,
) -> Result<NoiseDecomposition> {
    let (nx, ny) = (sample.x_extent(), sample.y_extent());
    let xi = extract_residuals_with(sample, coeffs);
    let phi_bar = mean_field(&AxisProfile::from_sample(sample), table, b1, b2, nx, ny)?;
    let u = LatticeField::from_fn(nx, ny, |x, y| sample.phi(x, y) - phi_bar.get(x, y));
    let reconstructed = reconstruct_u(&xi, table);
    let exactness = u.sup_distance(&reconstructed);
    if !(exactness < RECONSTRUCTION_TOL) {
        return Err(Error::IdentityViolation {
            name: "duhamel reconstruction",
            residual: exactness,
            tol: RECONSTRUCTION_TOL,
        });
    }
    Ok(NoiseDecomposition {
        xi,
        phi_bar,
        u,
        reconstructed,
        exactness,
    })
}

/// Local picture at vertex `(x+1, y+1)`: `phi` on the three known corners
/// and the possible values of the fourth.
#[derive(Debug, Clone, Serialize)]
pub struct VertexOutcome {
    pub vertex: VertexType,
    pub probability: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseMoments {
    pub case: &'static str,
    pub corner_height: i32,
    pub convention: &'static str,
    pub outcomes: Vec<VertexOutcome>,
    pub mean: f64,
    pub second_moment: f64,
    /// Per-case closed form from the two-outcome computation.
    pub closed_form: f64,
    pub literal_rhs: f64,
    pub swapped_rhs: f64,
    pub matches_closed_form: bool,
    pub matches_literal: bool,
    pub matches_swapped: bool,
    /// `|mean|` relative to the largest corner value.
    pub relative_mean: f64,
}

/// Relative agreement used for "exact" moment matches.
const MOMENT_MATCH_TOL: f64 = 1e-12;

/// Relative size of a conditional mean still counted as zero.
pub const MEAN_ZERO_TOL: f64 = 1e-14;

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= MOMENT_MATCH_TOL * scale.max(f64::MIN_POSITIVE)
}

/// The conditional variance right-hand side
/// `(b2(1-b1) + b1(1-b2)) gx gy + b1(1-b2)(1-r) phi gx - b1(1-b1)(1-r) phi gy`.
pub fn conditional_variance_rhs(b1: f64, b2: f64, r: f64, phi: f64, gx: f64, gy: f64) -> f64 {
    (b2 * (1.0 - b1) + b1 * (1.0 - b2)) * gx * gy + b1 * (1.0 - b2) * (1.0 - r) * phi * gx
        - b1 * (1.0 - b1) * (1.0 - r) * phi * gy
}

/// Exact conditional moments of `xi(x+1, y+1)` given the inputs of the
/// vertex and the height `h` of the face south-west of it. Does not insist on
/// a zero mean; see [`conditional_moment_check`].
pub fn conditional_moments(
    params: &ModelParams,
    case: VertexCase,
    h: i32,
    convention: HeightConvention,
) -> CaseMoments {
    let (b1, b2, q) = (params.b1(), params.b2(), params.q());
    let (sx, sy) = convention.signs();
    let (below, left) = case.inputs();
    let h_east = h + if below { sx } else { 0 };
    let h_north = h + if left { sy } else { 0 };
    let (p00, p10, p01) = (q.powi(h), q.powi(h_east), q.powi(h_north));
    let c = RecurrenceCoefficients::from_params(params);
    let outcomes: Vec<VertexOutcome> = case
        .outcomes(params)
        .into_iter()
        .map(|(vertex, probability)| {
            let (up, _) = vertex.outputs();
            let h11 = h_north + if up { sx } else { 0 };
            let xi = q.powi(h11) - c.propagate(p01, p10, p00);
            VertexOutcome {
                vertex,
                probability,
                xi,
            }
        })
        .collect();
    let mean: f64 = outcomes.iter().map(|o| o.probability * o.xi).sum();
    let second_moment: f64 = outcomes.iter().map(|o| o.probability * o.xi * o.xi).sum();
    let q2h = q.powi(2 * h);
    let closed_form = match case {
        VertexCase::None | VertexCase::Both => 0.0,
        VertexCase::Left => b1 * (1.0 - b1) * (q.powi(sy) - 1.0).powi(2) * q2h,
        VertexCase::Bottom => b2 * (1.0 - b2) * (q.powi(sx) - 1.0).powi(2) * q2h,
    };
    let (gx, gy) = (p10 - p00, p01 - p00);
    let literal_rhs = conditional_variance_rhs(b1, b2, q, p00, gx, gy);
    let swapped_rhs = conditional_variance_rhs(b1, b2, 1.0 / q, p00, gx, gy);
    let scale = p00.max(p10).max(p01);
    // size of the individual right-hand-side terms, so a zero moment
    // compares against round-off rather than against zero
    let terms = p00 * (gx.abs() + gy.abs()) + (gx * gy).abs();
    let vscale = second_moment
        .abs()
        .max(closed_form.abs())
        .max(terms)
        .max(scale * scale * f64::EPSILON);
    CaseMoments {
        case: case.name(),
        corner_height: h,
        convention: convention.name(),
        mean,
        second_moment,
        closed_form,
        literal_rhs,
        swapped_rhs,
        matches_closed_form: close(second_moment, closed_form, vscale),
        matches_literal: close(second_moment, literal_rhs, vscale),
        matches_swapped: close(second_moment, swapped_rhs, vscale),
        relative_mean: mean.abs() / scale,
        outcomes,
    }
}

/// [`conditional_moments`], failing if the conditional mean is not zero.
pub fn conditional_moment_check(
    params: &ModelParams,
    case: VertexCase,
    h: i32,
    convention: HeightConvention,
) -> Result<CaseMoments> {
    let m = conditional_moments(params, case, h, convention);
    if !(m.relative_mean <= MEAN_ZERO_TOL) {
        return Err(Error::NonzeroConditionalMean {
            case: m.case,
            mean: m.mean,
        });
    }
    Ok(m)
}

/// `E[|xi|^k | case]`.
pub fn conditional_abs_moment(
    params: &ModelParams,
    case: VertexCase,
    h: i32,
    convention: HeightConvention,
    k: i32,
) -> f64 {
    conditional_moments(params, case, h, convention)
        .outcomes
        .iter()
        .map(|o| o.probability * o.xi.abs().powi(k))
        .sum()
}

/// Sites of the positive quadrant in anti-diagonal order
/// `(1,1), (2,1), (1,2), (3,1), (2,2), (1,3), ...`.
pub fn linear_order() -> impl Iterator<Item = (usize, usize)> {
    (2usize..).flat_map(|d| (1..d).rev().map(move |x| (x, d - x)))
}

/// 1-based position of `(x, y)` in [`linear_order`].
pub fn linear_index(x: usize, y: usize) -> u64 {
    let d = (x + y) as u64;
    (d - 1) * (d - 2) / 2 + y as u64
}

/// Smallest `c` with every site of `[1, X] x [1, Y]` at linear position
/// `<= c L^2`, where `X`, `Y` are the largest point coordinates.
pub fn horizon_constant(points: &[(usize, usize)], scale: u32) -> u64 {
    let x = points.iter().map(|p| p.0).max().unwrap_or(0).max(1);
    let y = points.iter().map(|p| p.1).max().unwrap_or(0).max(1);
    let l2 = (scale as u64).pow(2);
    linear_index(x, y).div_ceil(l2)
}

/// `gamma_xy`, `gamma_x`, `gamma_y`, with `r` in place of the ratio inside
/// the `(1 - r)` factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaCoefficients {
    pub xy: f64,
    pub x: f64,
    pub y: f64,
}

impl GammaCoefficients {
    pub fn with_ratio(params: &ModelParams, r: f64) -> Self {
        let (b1, b2, l) = (params.b1(), params.b2(), params.scale_f64());
        Self {
            xy: l * (b2 * (1.0 - b1) + b1 * (1.0 - b2)),
            x: l * l * b1 * (1.0 - b2) * (1.0 - r),
            y: -l * l * b1 * (1.0 - b1) * (1.0 - r),
        }
    }

    /// `r = q = b1 / b2`.
    pub fn literal(params: &ModelParams) -> Self {
        Self::with_ratio(params, params.q())
    }

    /// `r = b2 / b1`; the reading under which `L^-3 D^d` is the conditional
    /// variance of `xi`.
    pub fn swapped(params: &ModelParams) -> Self {
        Self::with_ratio(params, 1.0 / params.q())
    }

    /// Large-`L` limits of [`GammaCoefficients::swapped`].
    pub fn continuum(beta1: f64, beta2: f64) -> Self {
        Self {
            xy: beta1 + beta2,
            x: beta2 * (beta2 - beta1),
            y: -beta1 * (beta2 - beta1),
        }
    }

    pub fn distance(&self, other: &GammaCoefficients) -> f64 {
        (self.xy - other.xy)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
    }
}

/// `D^d(x, y; phi) = g_xy (L grad_x phi)(L grad_y phi) + g_x phi L grad_x phi + g_y phi L grad_y phi`.
pub fn discrete_intensity(gamma: &GammaCoefficients, scale: f64, phi: &LatticeSample, x: usize, y: usize) -> f64 {
    let p = phi.phi(x, y);
    let gx = scale * (phi.phi(x + 1, y) - p);
    let gy = scale * (phi.phi(x, y + 1) - p);
    gamma.xy * gx * gy + gamma.x * p * gx + gamma.y * p * gy
}

/// Martingale `M_i(t) = sum_{s <= t} sqrt(L) R^d(X_i - x(s), Y_i - y(s)) xi(x(s), y(s))`
/// read off at the requested times, one row per time.
pub fn martingale_path(
    xi: &LatticeField,
    table: &KernelTable,
    points: &[(usize, usize)],
    scale: u32,
    times: &[u64],
) -> Vec<Vec<f64>> {
    let sl = (scale as f64).sqrt();
    let t_max = times.iter().copied().max().unwrap_or(0);
    let mut m = vec![0.0; points.len()];
    let mut rows = Vec::with_capacity(times.len());
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by_key(|&k| times[k]);
    let mut out: Vec<Option<Vec<f64>>> = vec![None; times.len()];
    let mut next = 0;
    while next < order.len() && times[order[next]] == 0 {
        out[order[next]] = Some(m.clone());
        next += 1;
    }
    for (t, (x, y)) in (1..=t_max).zip(linear_order()) {
        if x <= xi.x_extent() && y <= xi.y_extent() {
            let e = xi.get(x, y);
            if e != 0.0 {
                for (mi, &(px, py)) in m.iter_mut().zip(points) {
                    if x <= px && y <= py {
                        *mi += sl * table.get(px - x, py - y) * e;
                    }
                }
            }
        }
        while next < order.len() && times[order[next]] == t {
            out[order[next]] = Some(m.clone());
            next += 1;
        }
    }
    rows.extend(out.into_iter().map(|r| r.unwrap_or_default()));
    rows
}

/// Predictable bracket `<M_i, M_j>` at the horizon, row-major `n x n`:
/// `L^-2 sum_s R_i R_j D^d(x(s) - 1, y(s) - 1; phi)` in linear order.
pub fn bracket(
    sample: &LatticeSample,
    table: &KernelTable,
    points: &[(usize, usize)],
    gamma: &GammaCoefficients,
    scale: u32,
) -> Vec<f64> {
    let n = points.len();
    let xmax = points.iter().map(|p| p.0).max().unwrap_or(0);
    let ymax = points.iter().map(|p| p.1).max().unwrap_or(0);
    let l = scale as f64;
    let mut acc = vec![0.0; n * n];
    let mut r = vec![0.0; n];
    for d in 2..=(xmax + ymax) {
        for x in (1..d).rev() {
            let y = d - x;
            if x > xmax || y > ymax {
                continue;
            }
            let dd = discrete_intensity(gamma, l, sample, x - 1, y - 1);
            if dd == 0.0 {
                continue;
            }
            for (ri, &(px, py)) in r.iter_mut().zip(points) {
                *ri = if x <= px && y <= py {
                    table.get(px - x, py - y)
                } else {
                    0.0
                };
            }
            for i in 0..n {
                for j in 0..n {
                    acc[i * n + j] += r[i] * r[j] * dd;
                }
            }
        }
    }
    acc.iter().map(|v| v / (l * l)).collect()
}

/// Replica-level martingale checks.
#[derive(Debug, Clone, Serialize)]
pub struct MartingaleDiagnostics {
    pub points: Vec<(usize, usize)>,
    pub horizon_constant: u64,
    pub gamma_literal: GammaCoefficients,
    pub gamma_swapped: GammaCoefficients,
    pub gamma_continuum: GammaCoefficients,
    /// Largest `|M_i(c* L^2 + k) - M_i(c* L^2)|` over the probed `k`.
    pub post_horizon_drift: f64,
    /// Largest `|M_i(c* L^2) - sqrt(L) u_i|`.
    pub terminal_mismatch: f64,
    /// Ensemble mean and standard deviation of the swapped-reading bracket.
    pub bracket_mean: Vec<f64>,
    pub bracket_sd: Vec<f64>,
    /// Ensemble covariance of `sqrt(L) u` at the points.
    pub empirical_covariance: Vec<f64>,
}

/// Run the martingale checks on a set of samples sharing one deterministic
/// boundary.
pub fn martingale_diagnostics(
    samples: &[LatticeSample],
    params: &ModelParams,
    table: &KernelTable,
    points: &[(usize, usize)],
) -> Result<MartingaleDiagnostics> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "martingale diagnostics need at least two points".into(),
        ));
    }
    let l = params.scale();
    let cstar = horizon_constant(points, l);
    let horizon = cstar * (l as u64).pow(2);
    let gamma = GammaCoefficients::swapped(params);
    let n = points.len();
    let sl = params.scale_f64().sqrt();
    let mut drift = 0.0f64;
    let mut mismatch = 0.0f64;
    let mut brackets = Vec::with_capacity(samples.len());
    let mut values = Vec::with_capacity(samples.len());
    for sample in samples {
        let dec = decompose(sample, params, table)?;
        let path = martingale_path(&dec.xi, table, points, l, &[horizon, horizon + 1, horizon + l as u64]);
        for (i, &(px, py)) in points.iter().enumerate() {
            drift = drift
                .max((path[1][i] - path[0][i]).abs())
                .max((path[2][i] - path[0][i]).abs());
            mismatch = mismatch.max((path[0][i] - sl * dec.u.get(px, py)).abs());
        }
        values.push(
            points
                .iter()
                .map(|&(px, py)| sl * dec.u.get(px, py))
                .collect::<Vec<_>>(),
        );
        brackets.push(bracket(sample, table, points, &gamma, l));
    }
    let m = samples.len().max(1) as f64;
    let mut bracket_mean = vec![0.0; n * n];
    for b in &brackets {
        for (a, v) in bracket_mean.iter_mut().zip(b) {
            *a += v / m;
        }
    }
    let mut bracket_sd = vec![0.0; n * n];
    for b in &brackets {
        for (k, v) in b.iter().enumerate() {
            bracket_sd[k] += (v - bracket_mean[k]).powi(2) / (m - 1.0).max(1.0);
        }
    }
    bracket_sd.iter_mut().for_each(|v| *v = v.sqrt());
    let means: Vec<f64> = (0..n).map(|i| values.iter().map(|v| v[i]).sum::<f64>() / m).collect();
    let mut empirical_covariance = vec![0.0; n * n];
    for v in &values {
        for i in 0..n {
            for j in 0..n {
                empirical_covariance[i * n + j] += (v[i] - means[i]) * (v[j] - means[j]) / (m - 1.0).max(1.0);
            }
        }
    }
    Ok(MartingaleDiagnostics {
        points: points.to_vec(),
        horizon_constant: cstar,
        gamma_literal: GammaCoefficients::literal(params),
        gamma_swapped: gamma,
        gamma_continuum: GammaCoefficients::continuum(params.beta1(), params.beta2()),
        post_horizon_drift: drift,
        terminal_mismatch: mismatch,
        bracket_mean,
        bracket_sd,
        empirical_covariance,
    })
}

//! Replica orchestration and the three experiment reports: law of large
//! numbers, Gaussian fluctuations, and the exact-identity oracles.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{BoundaryCondition, BoundarySpec};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::exact::{enumerate_exact, DEFAULT_BRANCH_CAP};
use crate::fluctuation::FluctuationModel;
use crate::kernels::{
    riemann_continuum, riemann_discrete_quadrature, verify_kernel_convergence, KernelTable, QuadratureOptions,
    RecurrenceCoefficients,
};
use crate::lattice::{sample_replica, AxisProfile, HeightConvention, VertexCase};
use crate::noise::{conditional_moments, decompose, decompose_with, mean_field, MEAN_ZERO_TOL};
use crate::params::ModelParams;
use crate::rng::{replica_rng, Stream};
use crate::stats::{self, Summary};
use crate::telegraph::{BoundaryProfile, GridSpec, TelegraphProblem, TelegraphSolution};

/// One pass/fail criterion with the number it was decided on.
#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: String,
}

impl Gate {
    fn new(name: impl Into<String>, passed: bool, measured: f64, threshold: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            measured,
            threshold: threshold.into(),
        }
    }
}

pub fn all_passed(gates: &[Gate]) -> bool {
    gates.iter().all(|g| g.passed)
}

/// Telegraph problem fed with the realised axis values of `phi` at scale
/// `L`, as sampled profiles with step `1 / L`.
pub fn axis_problem(
    params: &ModelParams,
    axis: &AxisProfile,
    options: crate::telegraph::TelegraphOptions,
) -> Result<TelegraphProblem> {
    let step = 1.0 / params.scale_f64();
    let chi = BoundaryProfile::sampled(step, axis.bottom.clone())?;
    let psi = BoundaryProfile::sampled(step, axis.left.clone())?;
    let (xm, ym) = (chi.extent(), psi.extent());
    TelegraphProblem::new(params.beta1(), params.beta2(), chi, psi, xm, ym, options)
}

#[derive(Debug, Clone, Serialize)]
pub struct LlnRow {
    pub scale: u32,
    pub window: usize,
    pub phi_errors: Vec<f64>,
    pub height_errors: Vec<f64>,
    pub median_phi_error: f64,
    pub median_height_error: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LlnReport {
    pub rows: Vec<LlnRow>,
    pub grid_step: f64,
    pub gates: Vec<Gate>,
}

/// Sup over telegraph grid nodes of `|phi_L - Phi|` and `|H / L - log_{q^L} Phi|`,
/// per replica, for every scale in the sweep.
pub fn run_lln(cfg: &ExperimentConfig) -> Result<LlnReport> {
    let mut rows = Vec::new();
    for &scale in &cfg.lln.scales {
        let start = Instant::now();
        let params = ModelParams::new(scale, cfg.beta1, cfg.beta2)?;
        let n = ExperimentConfig::window(scale, cfg.lln.extent);
        let bc = cfg.bc.build(n, n)?;
        let axis = AxisProfile::from_boundary(&params, &bc, n, n, cfg.convention);
        let problem = axis_problem(&params, &axis, cfg.telegraph)?;
        let nodes = ((n as f64 / params.scale_f64()) / cfg.grid_step + 1e-9).floor() as usize;
        let grid = GridSpec {
            step: cfg.grid_step,
            nx: nodes,
            ny: nodes,
        };
        let solution = problem.solve(grid)?;
        let base = 1.0 / params.frak_q();
        let log_field = solution.log_field(base);
        let l = params.scale_f64();
        let seed = cfg.seed.wrapping_add(scale as u64);
        let errors: Vec<(f64, f64)> = (0..cfg.lln.replicas)
            .into_par_iter()
            .map(|r| {
                let s = sample_replica(&params, &bc, n, n, seed, r as u64)?.with_convention(cfg.convention);
                let mut ephi = 0.0f64;
                let mut eh = 0.0f64;
                for j in 0..=nodes {
                    for i in 0..=nodes {
                        let (x, y) = lattice_point(i as f64 * grid.step, j as f64 * grid.step, l, n);
                        ephi = ephi.max((s.phi(x, y) - solution.phi(i, j)).abs());
                        let hf = log_field[j * (nodes + 1) + i];
                        eh = eh.max((s.height(x, y) as f64 / l - hf).abs());
                    }
                }
                Ok((ephi, eh))
            })
            .collect::<Result<_>>()?;
        let phi_errors: Vec<f64> = errors.iter().map(|e| e.0).collect();
        let height_errors: Vec<f64> = errors.iter().map(|e| e.1).collect();
        rows.push(LlnRow {
            scale,
            window: n,
            median_phi_error: stats::median(&phi_errors),
            median_height_error: stats::median(&height_errors),
            phi_errors,
            height_errors,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let medians: Vec<f64> = rows.iter().map(|r| r.median_phi_error).collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let last = medians.last().copied().unwrap_or(f64::NAN);
    let gates = vec![
        Gate::new(
            "lln median sup error strictly decreasing",
            decreasing,
            medians
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max),
            "< 0 between consecutive scales",
        ),
        Gate::new(
            "lln median sup error at largest scale",
            last <= cfg.thresholds.lln_final,
            last,
            format!("<= {}", cfg.thresholds.lln_final),
        ),
    ];
    Ok(LlnReport {
        rows,
        grid_step: cfg.grid_step,
        gates,
    })
}

/// `(floor(x L), floor(y L))`, clipped to the window.
fn lattice_point(x: f64, y: f64, l: f64, n: usize) -> (usize, usize) {
    let f = |t: f64| ((t * l + 1e-9).floor() as usize).min(n);
    (f(x), f(y))
}

#[derive(Debug, Clone, Serialize)]
pub struct PointStats {
    pub point: (f64, f64),
    pub lattice: (usize, usize),
    pub phi: Summary,
    pub height: Summary,
    pub predicted: f64,
    pub predicted_height: f64,
    pub variance_ratio: f64,
    pub height_ratio: f64,
    /// `sqrt(L) (phi - phi_bar)` with the exact mean field.
    pub exact_centering: Summary,
    pub mean_field: f64,
    pub telegraph_phi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairStats {
    pub points: (usize, usize),
    pub empirical: f64,
    pub standard_error: f64,
    pub predicted: f64,
    pub z: f64,
    pub empirical_correlation: f64,
    pub predicted_correlation: f64,
    pub height_empirical: f64,
    pub height_predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub scale: u32,
    pub replicas: usize,
    pub window: usize,
    pub points: Vec<PointStats>,
    pub pairs: Vec<PairStats>,
    pub lambda: Vec<f64>,
    pub lambda_height: Vec<f64>,
    pub sampling_seconds: f64,
    pub prediction_seconds: f64,
    pub gates: Vec<Gate>,
}

/// Replica ensemble of `phi` and `H` at the evaluation points.
pub fn point_ensemble(
    params: &ModelParams,
    bc: &BoundaryCondition,
    window: usize,
    lattice: &[(usize, usize)],
    replicas: usize,
    seed: u64,
    convention: HeightConvention,
) -> Result<Vec<Vec<(f64, i32)>>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let s = sample_replica(params, bc, window, window, seed, r as u64)?.with_convention(convention);
            Ok(lattice.iter().map(|&(x, y)| (s.phi(x, y), s.height(x, y))).collect())
        })
        .collect()
}

/// Empirical covariance of `sqrt(L) u` and of `H / sqrt(L)` at the points
/// against `Lambda` and the height covariance.
pub fn run_clt(cfg: &ExperimentConfig) -> Result<CltReport> {
    if cfg.points.is_empty() {
        return Err(Error::Config("no evaluation points".into()));
    }
    let params = cfg.params()?;
    let l = params.scale_f64();
    let n = ExperimentConfig::window(cfg.scale, cfg.extent);
    let bc = cfg.bc.build(n, n)?;
    let lattice: Vec<(usize, usize)> = cfg.points.iter().map(|&(x, y)| lattice_point(x, y, l, n)).collect();

    let start = Instant::now();
    let ensemble = point_ensemble(&params, &bc, n, &lattice, cfg.replicas, cfg.seed, cfg.convention)?;
    let sampling_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let axis = AxisProfile::from_boundary(&params, &bc, n, n, cfg.convention);
    let problem = Arc::new(axis_problem(&params, &axis, cfg.telegraph)?);
    let model = FluctuationModel::from_problem(problem.clone(), cfg.covariance);
    // Evaluate at the lattice points actually sampled.
    let macro_points: Vec<(f64, f64)> = lattice.iter().map(|&(x, y)| (x as f64 / l, y as f64 / l)).collect();
    let lambda = model.covariance(&macro_points)?;
    let lambda_height = model.height_covariance(&lambda)?;
    let table = KernelTable::build(&params, n, n);
    let phi_bar = mean_field(&axis, &table, params.b1(), params.b2(), n, n)?;
    let prediction_seconds = start.elapsed().as_secs_f64();

    let k = cfg.points.len();
    let sl = l.sqrt();
    let column = |i: usize| -> (Vec<f64>, Vec<f64>) {
        let phis: Vec<f64> = ensemble.iter().map(|r| r[i].0).collect();
        let hs: Vec<f64> = ensemble.iter().map(|r| r[i].1 as f64).collect();
        let m = stats::mean(&phis);
        let mh = stats::mean(&hs);
        (
            phis.iter().map(|p| sl * (p - m)).collect(),
            hs.iter().map(|h| (h - mh) / sl).collect(),
        )
    };
    let columns: Vec<(Vec<f64>, Vec<f64>)> = (0..k).map(column).collect();
    let mut points = Vec::with_capacity(k);
    for i in 0..k {
        let (u, h) = &columns[i];
        let phi = Summary::of(u);
        let height = Summary::of(h);
        let (lx, ly) = lattice[i];
        let exact: Vec<f64> = ensemble.iter().map(|r| sl * (r[i].0 - phi_bar.get(lx, ly))).collect();
        let (px, py) = macro_points[i];
        points.push(PointStats {
            point: cfg.points[i],
            lattice: lattice[i],
            variance_ratio: phi.variance / lambda.get(i, i),
            height_ratio: height.variance / lambda_height[i * k + i],
            predicted: lambda.get(i, i),
            predicted_height: lambda_height[i * k + i],
            phi,
            height,
            exact_centering: Summary::of(&exact),
            mean_field: phi_bar.get(lx, ly),
            telegraph_phi: problem.eval(px, py)?.phi,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let (ui, hi) = &columns[i];
            let (uj, hj) = &columns[j];
            let empirical = stats::covariance(ui, uj);
            let standard_error = stats::covariance_se(ui, uj);
            let predicted = lambda.get(i, j);
            pairs.push(PairStats {
                points: (i, j),
                empirical,
                standard_error,
                predicted,
                z: (empirical - predicted) / standard_error,
                empirical_correlation: empirical / (stats::variance(ui) * stats::variance(uj)).sqrt(),
                predicted_correlation: predicted / (lambda.get(i, i) * lambda.get(j, j)).sqrt(),
                height_empirical: stats::covariance(hi, hj),
                height_predicted: lambda_height[i * k + j],
            });
        }
    }
    let t = &cfg.thresholds;
    let in_band = |v: f64, band: (f64, f64)| v >= band.0 && v <= band.1;
    let mut gates = vec![
        Gate::new(
            format!("variance ratio at {:?}", cfg.points[0]),
            in_band(points[0].variance_ratio, t.variance_ratio),
            points[0].variance_ratio,
            format!("in [{}, {}]", t.variance_ratio.0, t.variance_ratio.1),
        ),
        Gate::new(
            format!("height variance ratio at {:?}", cfg.points[0]),
            in_band(points[0].height_ratio, t.height_ratio),
            points[0].height_ratio,
            format!("in [{}, {}]", t.height_ratio.0, t.height_ratio.1),
        ),
    ];
    for p in &pairs {
        gates.push(Gate::new(
            format!(
                "cross-covariance {:?} vs {:?}",
                cfg.points[p.points.0], cfg.points[p.points.1]
            ),
            p.z.abs() <= t.cross_se,
            p.z,
            format!("|z| <= {}", t.cross_se),
        ));
    }
    for p in &points {
        gates.push(Gate::new(
            format!("skewness at {:?}", p.point),
            p.phi.skewness.abs() < t.skewness,
            p.phi.skewness,
            format!("|.| < {}", t.skewness),
        ));
        gates.push(Gate::new(
            format!("excess kurtosis at {:?}", p.point),
            p.phi.excess_kurtosis.abs() < t.excess_kurtosis,
            p.phi.excess_kurtosis,
            format!("|.| < {}", t.excess_kurtosis),
        ));
    }
    Ok(CltReport {
        scale: cfg.scale,
        replicas: cfg.replicas,
        window: n,
        points,
        pairs,
        lambda: lambda.values.clone(),
        lambda_height,
        sampling_seconds,
        prediction_seconds,
        gates,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConventionResult {
    pub convention: &'static str,
    pub max_discrepancy: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub b1: f64,
    pub b2: f64,
    pub corner_height: i32,
    pub case: &'static str,
    pub relative_mean: f64,
    pub matches_closed_form: bool,
    pub matches_literal: bool,
    pub matches_swapped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub conventions: Vec<ConventionResult>,
    pub reconstruction_sup: f64,
    pub mutated_reconstruction_sup: f64,
    pub kernel_recurrence_sup: f64,
    pub kernel_axis_sup: f64,
    pub moments: Vec<MomentRow>,
    pub kernel_convergence_decreasing: bool,
    pub gates: Vec<Gate>,
}

/// A mixed boundary for the enumeration oracle: lines enter on both axes.
pub fn mixed_boundary(window: usize) -> BoundarySpec {
    BoundarySpec::Explicit {
        left: (0..window).map(|k| (k % 2 == 0) as u8).collect(),
        bottom: (0..window).map(|k| (k % 3 != 1) as u8).collect(),
    }
}

/// Largest `|E[phi] - phi_bar|` over the window, exact expectation by
/// enumeration.
pub fn enumeration_discrepancy(
    params: &ModelParams,
    spec: &BoundarySpec,
    window: usize,
    convention: HeightConvention,
) -> Result<f64> {
    let bc = spec.build(window, window)?;
    let law = enumerate_exact(
        params,
        &bc,
        window,
        window,
        convention,
        DEFAULT_BRANCH_CAP.max(window * window),
    )?;
    let axis = AxisProfile::from_boundary(params, &bc, window, window, convention);
    let table = KernelTable::build(params, window, window);
    let bar = mean_field(&axis, &table, params.b1(), params.b2(), window, window)?;
    let mut worst = 0.0f64;
    for y in 0..=window {
        for x in 0..=window {
            worst = worst.max((law.mean_phi(x, y) - bar.get(x, y)).abs());
        }
    }
    Ok(worst)
}

/// All exact identities.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let v = &cfg.verify;
    let t = &cfg.thresholds;
    let mut gates = Vec::new();

    // Enumeration against the mean-field formula, per convention.
    let mut conventions = Vec::new();
    for conv in HeightConvention::ALL {
        let mut worst = 0.0f64;
        for &(b1, b2) in &v.weights {
            let p = ModelParams::from_weights(b1, b2)?;
            for spec in [BoundarySpec::Step, mixed_boundary(v.exact_window)] {
                worst = worst.max(enumeration_discrepancy(&p, &spec, v.exact_window, conv)?);
            }
        }
        conventions.push(ConventionResult {
            convention: conv.name(),
            max_discrepancy: worst,
            passed: worst < t.exact,
        });
    }
    let passing = conventions.iter().filter(|c| c.passed).count();
    gates.push(Gate::new(
        "exactly one height convention matches enumeration",
        passing == 1,
        passing as f64,
        format!("one convention below {}", t.exact),
    ));

    // Duhamel reconstruction and its mutation.
    let p = ModelParams::new(v.reconstruction_scale, cfg.beta1, cfg.beta2)?;
    let w = v.reconstruction_window;
    let bc = cfg.bc.build(w, w)?;
    let table = KernelTable::build(&p, w, w);
    let sups: Vec<f64> = (0..v.reconstruction_samples)
        .into_par_iter()
        .map(|r| {
            let s = sample_replica(&p, &bc, w, w, cfg.seed, r as u64)?;
            match decompose(&s, &p, &table) {
                Ok(d) => Ok(d.exactness),
                Err(Error::IdentityViolation { residual, .. }) => Ok(residual),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let reconstruction_sup = sups.iter().cloned().fold(0.0, f64::max);
    gates.push(Gate::new(
        "duhamel reconstruction",
        reconstruction_sup < t.reconstruction,
        reconstruction_sup,
        format!("< {}", t.reconstruction),
    ));
    let mut mutated = RecurrenceCoefficients::from_params(&p);
    mutated.x_lag += v.mutation;
    let s0 = sample_replica(&p, &bc, w, w, cfg.seed, 0)?;
    let mutated_reconstruction_sup = match decompose_with(&s0, &mutated, &table, p.b1(), p.b2()) {
        Ok(d) => d.exactness,
        Err(Error::IdentityViolation { residual, .. }) => residual,
        Err(e) => return Err(e),
    };
    gates.push(Gate::new(
        "mutated coefficient breaks reconstruction",
        mutated_reconstruction_sup >= t.reconstruction,
        mutated_reconstruction_sup,
        format!(">= {}", t.reconstruction),
    ));

    // Kernel: recurrence against quadrature, and closed axis values.
    let opts = QuadratureOptions::default();
    let kw = v.kernel_window;
    let mut kernel_recurrence_sup = 0.0f64;
    let mut kernel_axis_sup = 0.0f64;
    for &(b1, b2) in v.weights.iter().take(1) {
        let wp = ModelParams::from_weights(b1, b2)?;
        for sp in [wp, p] {
            let table = KernelTable::build(&sp, kw, kw);
            for y in 0..=kw {
                for x in 0..=kw {
                    let q = riemann_discrete_quadrature(&sp, x as u32, y as u32, &opts)?;
                    kernel_recurrence_sup = kernel_recurrence_sup.max((q - table.get(x, y)).abs());
                }
            }
            for k in 0..=kw {
                kernel_axis_sup = kernel_axis_sup
                    .max((table.get(k, 0) - sp.b1().powi(k as i32)).abs())
                    .max((table.get(0, k) - sp.b2().powi(k as i32)).abs());
            }
        }
    }
    for k in 0..=4 {
        let s = k as f64 * 0.5;
        kernel_axis_sup = kernel_axis_sup
            .max((riemann_continuum(cfg.beta1, cfg.beta2, s, 0.0, &opts)? - (-cfg.beta1 * s).exp()).abs())
            .max((riemann_continuum(cfg.beta1, cfg.beta2, 0.0, s, &opts)? - (-cfg.beta2 * s).exp()).abs());
    }
    gates.push(Gate::new(
        "kernel recurrence vs quadrature",
        kernel_recurrence_sup < t.kernel,
        kernel_recurrence_sup,
        format!("< {}", t.kernel),
    ));
    gates.push(Gate::new(
        "kernel axis values",
        kernel_axis_sup < t.kernel,
        kernel_axis_sup,
        format!("< {}", t.kernel),
    ));

    // Conditional moments on random weights and heights.
    let mut rng = replica_rng(cfg.seed, 0, Stream::Boundary);
    let mut moments = Vec::new();
    for _ in 0..v.moment_triples {
        let b1 = rng.random_range(0.05..0.95);
        let b2 = loop {
            let b: f64 = rng.random_range(0.05..0.95);
            if (b - b1).abs() > 1e-3 {
                break b;
            }
        };
        let h = rng.random_range(-5..=5);
        let mp = ModelParams::from_weights(b1, b2)?;
        for case in VertexCase::ALL {
            let m = conditional_moments(&mp, case, h, cfg.convention);
            moments.push(MomentRow {
                b1,
                b2,
                corner_height: h,
                case: m.case,
                relative_mean: m.relative_mean,
                matches_closed_form: m.matches_closed_form,
                matches_literal: m.matches_literal,
                matches_swapped: m.matches_swapped,
            });
        }
    }
    let worst_mean = moments.iter().map(|m| m.relative_mean).fold(0.0, f64::max);
    gates.push(Gate::new(
        "conditional mean zero",
        worst_mean <= MEAN_ZERO_TOL,
        worst_mean,
        format!("<= {MEAN_ZERO_TOL} relative"),
    ));
    let closed = moments.iter().all(|m| m.matches_closed_form);
    gates.push(Gate::new(
        "conditional variance closed forms",
        closed,
        moments.iter().filter(|m| !m.matches_closed_form).count() as f64,
        "all cases match",
    ));

    let conv = verify_kernel_convergence(cfg.beta1, cfg.beta2, &v.convergence_scales, 1.0, 2, &opts)?;
    gates.push(Gate::new(
        "kernel convergence strictly decreasing for |k| <= 2",
        conv.strictly_decreasing(),
        conv.non_decreasing.len() as f64,
        "no order fails",
    ));

    Ok(VerifyReport {
        conventions,
        reconstruction_sup,
        mutated_reconstruction_sup,
        kernel_recurrence_sup,
        kernel_axis_sup,
        moments,
        kernel_convergence_decreasing: conv.strictly_decreasing(),
        gates,
    })
}

/// Telegraph solution for the configured boundary at the configured scale,
/// on `[0, extent]^2`.
pub fn configured_solution(cfg: &ExperimentConfig) -> Result<(Arc<TelegraphProblem>, TelegraphSolution)> {
    let params = cfg.params()?;
    let n = ExperimentConfig::window(cfg.scale, cfg.extent);
    let bc = cfg.bc.build(n, n)?;
    let axis = AxisProfile::from_boundary(&params, &bc, n, n, cfg.convention);
    let problem = Arc::new(axis_problem(&params, &axis, cfg.telegraph)?);
    let nodes = ((n as f64 / params.scale_f64()) / cfg.grid_step + 1e-9).floor() as usize;
    let solution = problem.solve(GridSpec {
        step: cfg.grid_step,
        nx: nodes,
        ny: nodes,
    })?;
    Ok((problem, solution))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            scale: 16,
            replicas: 200,
            extent: 1.25,
            points: vec![(1.0, 1.0), (0.5, 0.75)],
            grid_step: 1.0 / 16.0,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn empty_boundary_has_no_fluctuations() {
        let cfg = ExperimentConfig {
            bc: BoundarySpec::Empty,
            ..small()
        };
        let params = cfg.params().unwrap();
        let bc = cfg.bc.build(20, 20).unwrap();
        let e = point_ensemble(&params, &bc, 20, &[(16, 16)], 50, 1, HeightConvention::Standard).unwrap();
        assert!(e.iter().all(|r| r[0] == (1.0, 0)));
        let lln = run_lln(&ExperimentConfig {
            bc: BoundarySpec::Empty,
            lln: crate::config::LlnConfig {
                scales: vec![16, 32],
                replicas: 3,
                extent: 1.0,
            },
            grid_step: 1.0 / 16.0,
            ..ExperimentConfig::default()
        })
        .unwrap();
        for row in &lln.rows {
            assert!(row.median_phi_error < 1e-8, "{}", row.median_phi_error);
        }
    }

    #[test]
    fn replica_scheduling_does_not_change_results() {
        let cfg = small();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let params = cfg.params().unwrap();
            let bc = cfg.bc.build(20, 20).unwrap();
            pool.install(|| {
                point_ensemble(
                    &params,
                    &bc,
                    20,
                    &[(16, 16), (8, 12)],
                    64,
                    5,
                    HeightConvention::Standard,
                )
            })
            .unwrap()
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn verify_passes_on_defaults_with_small_sweep() {
        let mut cfg = ExperimentConfig::default();
        cfg.verify.weights = vec![(0.6, 0.9), (0.3, 0.5)];
        cfg.verify.exact_window = 3;
        cfg.verify.reconstruction_samples = 10;
        cfg.verify.moment_triples = 5;
        cfg.verify.convergence_scales = vec![16, 32, 64];
        let r = run_verify(&cfg).unwrap();
        for g in &r.gates {
            assert!(g.passed, "{g:?}");
        }
        assert_eq!(r.conventions.iter().filter(|c| c.passed).count(), 1);
        assert!(r.conventions[0].passed);
    }

    #[test]
    fn clt_report_structure() {
        let r = run_clt(&small()).unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.pairs.len(), 1);
        assert!(r.lambda[0] > 0.0);
        // exact centering and ensemble centering agree up to the mean's noise
        let p = &r.points[0];
        assert!((p.exact_centering.variance / p.phi.variance - 1.0).abs() < 0.1);
    }
}

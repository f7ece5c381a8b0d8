//! Telegraph equation `Phi_xy + beta2 Phi_x + beta1 Phi_y = 0` with
//! `Phi(x, 0) = chi(x)`, `Phi(0, y) = psi(y)`, solved through the mild
//! formula
//!
//! ```text
//! Phi(x, y) = psi(0) R(x, y)
//!           + int_0^y R(x, y - s) (psi'(s) + beta2 psi(s)) ds
//!           + int_0^x R(x - s, y) (chi'(s) + beta1 chi(s)) ds
//! ```
//!
//! Gradients come from differentiating the formula under the integral, not
//! from differencing `Phi`.

use std::num::NonZeroUsize;
use std::path::Path;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ContinuumKernel, QuadratureOptions};

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum ProfileRepr {
    Analytic {
        value: ProfileFn,
        derivative: ProfileFn,
    },
    /// Samples at `k * step`; derivatives by central differences.
    Sampled {
        step: f64,
        values: Vec<f64>,
        derivatives: Vec<f64>,
    },
}

/// Boundary datum `chi` or `psi` on `[0, extent]`.
#[derive(Clone)]
pub struct BoundaryProfile {
    repr: ProfileRepr,
    extent: f64,
    lipschitz: f64,
}

impl std::fmt::Debug for BoundaryProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.repr {
            ProfileRepr::Analytic { .. } => "analytic",
            ProfileRepr::Sampled { .. } => "sampled",
        };
        f.debug_struct("BoundaryProfile")
            .field("kind", &kind)
            .field("extent", &self.extent)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl BoundaryProfile {
    pub fn analytic<F, G>(value: F, derivative: G, extent: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let lipschitz = (0..=1000)
            .map(|i| derivative(extent * i as f64 / 1000.0).abs())
            .fold(0.0, f64::max);
        Self {
            repr: ProfileRepr::Analytic {
                value: Arc::new(value),
                derivative: Arc::new(derivative),
            },
            extent,
            lipschitz,
        }
    }

    pub fn constant(c: f64, extent: f64) -> Self {
        Self::analytic(move |_| c, |_| 0.0, extent)
    }

    /// `scale * exp(rate * t)`.
    pub fn exponential(scale: f64, rate: f64, extent: f64) -> Self {
        Self::analytic(
            move |t| scale * (rate * t).exp(),
            move |t| scale * rate * (rate * t).exp(),
            extent,
        )
    }

    /// Uniformly spaced samples `values[k] = f(k * step)`, at least two.
    pub fn sampled(step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(step > 0.0) {
            return Err(Error::InvalidParameter(
                "a sampled profile needs a positive step and at least two samples".into(),
            ));
        }
        let n = values.len();
        let derivatives: Vec<f64> = (0..n)
            .map(|k| match k {
                0 => (values[1] - values[0]) / step,
                k if k == n - 1 => (values[n - 1] - values[n - 2]) / step,
                k => (values[k + 1] - values[k - 1]) / (2.0 * step),
            })
            .collect();
        let lipschitz = values
            .windows(2)
            .map(|w| ((w[1] - w[0]) / step).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            extent: step * (n - 1) as f64,
            repr: ProfileRepr::Sampled {
                step,
                values,
                derivatives,
            },
            lipschitz,
        })
    }

    /// CSV with `t,value` rows (header optional), uniformly spaced from `t = 0`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for record in reader.records() {
            let record = record?;
            let (Some(t), Some(v)) = (record.get(0), record.get(1)) else {
                continue;
            };
            match (t.trim().parse::<f64>(), v.trim().parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    ts.push(t);
                    vs.push(v);
                }
                // header row
                _ if ts.is_empty() => continue,
                _ => return Err(Error::Config(format!("unparsable profile row {record:?}"))),
            }
        }
        if ts.len() < 2 || ts[0].abs() > 1e-12 {
            return Err(Error::Config(
                "profile must start at t = 0 with at least two rows".into(),
            ));
        }
        let step = ts[1] - ts[0];
        for (k, t) in ts.iter().enumerate() {
            if (t - step * k as f64).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(Error::Config("profile samples must be uniformly spaced".into()));
            }
        }
        Self::sampled(step, vs)
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            ProfileRepr::Analytic { value, .. } => value(t),
            ProfileRepr::Sampled { step, values, .. } => interpolate(values, *step, t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.repr {
            ProfileRepr::Analytic { derivative, .. } => derivative(t),
            ProfileRepr::Sampled { step, derivatives, .. } => interpolate(derivatives, *step, t),
        }
    }

    /// Pointwise sum, sampled on the finer of the two grids when needed.
    pub fn sum(&self, other: &BoundaryProfile) -> Result<Self> {
        match (&self.repr, &other.repr) {
            (ProfileRepr::Analytic { .. }, ProfileRepr::Analytic { .. }) => {
                let (a, b) = (self.clone(), other.clone());
                let (da, db) = (self.clone(), other.clone());
                Ok(Self::analytic(
                    move |t| a.value(t) + b.value(t),
                    move |t| da.derivative(t) + db.derivative(t),
                    self.extent.min(other.extent),
                ))
            }
            _ => {
                let step = match (&self.repr, &other.repr) {
                    (ProfileRepr::Sampled { step, .. }, ProfileRepr::Sampled { step: s2, .. }) => step.min(*s2),
                    (ProfileRepr::Sampled { step, .. }, _) | (_, ProfileRepr::Sampled { step, .. }) => *step,
                    _ => unreachable!(),
                };
                let extent = self.extent.min(other.extent);
                let n = (extent / step).round() as usize;
                Self::sampled(
                    step,
                    (0..=n)
                        .map(|k| self.value(k as f64 * step) + other.value(k as f64 * step))
                        .collect(),
                )
            }
        }
    }
}

fn interpolate(samples: &[f64], step: f64, t: f64) -> f64 {
    let s = (t / step).max(0.0);
    let k = (s.floor() as usize).min(samples.len() - 2);
    let frac = s - k as f64;
    samples[k] * (1.0 - frac) + samples[k + 1] * frac
}

/// Uniform grid `(i h, j h)`, `0 <= i <= nx`, `0 <= j <= ny`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(step: f64, extent: f64) -> Self {
        let n = (extent / step).round() as usize;
        Self { step, nx: n, ny: n }
    }

    pub fn x_max(&self) -> f64 {
        self.step * self.nx as f64
    }

    pub fn y_max(&self) -> f64 {
        self.step * self.ny as f64
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(1.0 / 64.0, 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TelegraphOptions {
    pub gauss_order: usize,
    /// Upper bound on the width of one Gauss-Legendre panel.
    pub panel_width: f64,
    pub contour: QuadratureOptions,
    /// Allowed `|chi(0) - psi(0)|`.
    pub corner_tol: f64,
}

impl Default for TelegraphOptions {
    fn default() -> Self {
        Self {
            gauss_order: 8,
            panel_width: 4.0 / 64.0,
            contour: QuadratureOptions {
                tol: 1e-12,
                ..QuadratureOptions::default()
            },
            corner_tol: 1e-8,
        }
    }
}

/// `Phi` and its gradients at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhiJet {
    pub phi: f64,
    pub dx: f64,
    pub dy: f64,
}

/// `D = (b1 + b2) Phi_x Phi_y + b2 (b2 - b1) Phi_x Phi - b1 (b2 - b1) Phi Phi_y`
/// (with `b_i` the rates), unclamped.
pub fn noise_intensity(beta1: f64, beta2: f64, jet: &PhiJet) -> f64 {
    (beta1 + beta2) * jet.dx * jet.dy + beta2 * (beta2 - beta1) * jet.dx * jet.phi
        - beta1 * (beta2 - beta1) * jet.phi * jet.dy
}

/// A telegraph boundary-value problem ready for pointwise evaluation.
#[derive(Debug, Clone)]
pub struct TelegraphProblem {
    beta1: f64,
    beta2: f64,
    chi: BoundaryProfile,
    psi: BoundaryProfile,
    kernel: ContinuumKernel,
    gauss: Vec<(f64, f64)>,
    options: TelegraphOptions,
    x_max: f64,
    y_max: f64,
}

impl TelegraphProblem {
    pub fn new(
        beta1: f64,
        beta2: f64,
        chi: BoundaryProfile,
        psi: BoundaryProfile,
        x_max: f64,
        y_max: f64,
        options: TelegraphOptions,
    ) -> Result<Self> {
        let (chi0, psi0) = (chi.value(0.0), psi.value(0.0));
        if (chi0 - psi0).abs() > options.corner_tol {
            return Err(Error::IncompatibleCorner { chi0, psi0 });
        }
        let order = NonZeroUsize::new(options.gauss_order)
            .ok_or_else(|| Error::InvalidParameter("Gauss-Legendre order must be positive".into()))?;
        let gauss = GaussLegendre::new(order).as_node_weight_pairs().to_vec();
        let kernel = ContinuumKernel::new(beta1, beta2, x_max, y_max, &options.contour)?;
        Ok(Self {
            beta1,
            beta2,
            chi,
            psi,
            kernel,
            gauss,
            options,
            x_max,
            y_max,
        })
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn kernel(&self) -> &ContinuumKernel {
        &self.kernel
    }

    pub fn chi(&self) -> &BoundaryProfile {
        &self.chi
    }

    pub fn psi(&self) -> &BoundaryProfile {
        &self.psi
    }

    /// Composite Gauss-Legendre nodes and weights on `[0, len]`.
    fn panels(&self, len: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let count = ((len / self.options.panel_width).ceil() as usize).max(1);
        let width = len / count as f64;
        (0..count).flat_map(move |p| {
            let a = p as f64 * width;
            self.gauss
                .iter()
                .map(move |&(t, w)| (a + 0.5 * width * (t + 1.0), 0.5 * width * w))
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<PhiJet> {
        let tol = 1e-12 * (1.0 + self.x_max.max(self.y_max));
        if x < 0.0 || y < 0.0 || x > self.x_max + tol || y > self.y_max + tol {
            return Err(Error::OutOfWindow { x, y });
        }
        let (b1, b2) = (self.beta1, self.beta2);
        let psi0 = self.psi.value(0.0);
        let corner = self.kernel.jet(x, y);
        let mut out = PhiJet {
            phi: psi0 * corner.value,
            dx: psi0 * corner.dx,
            dy: psi0 * corner.dy,
        };
        // Left-boundary integral.
        if y > 0.0 {
            for (s, w) in self.panels(y) {
                let g = self.psi.derivative(s) + b2 * self.psi.value(s);
                let k = self.kernel.jet(x, y - s);
                out.phi += w * k.value * g;
                out.dx += w * k.dx * g;
                out.dy += w * k.dy * g;
            }
        }
        // boundary term of d/dy: R(x, 0) g(y)
        out.dy += (-b1 * x).exp() * (self.psi.derivative(y) + b2 * self.psi.value(y));
        // Bottom-boundary integral.
        if x > 0.0 {
            for (s, w) in self.panels(x) {
                let f = self.chi.derivative(s) + b1 * self.chi.value(s);
                let k = self.kernel.jet(x - s, y);
                out.phi += w * k.value * f;
                out.dx += w * k.dx * f;
                out.dy += w * k.dy * f;
            }
        }
        // boundary term of d/dx: R(0, y) f(x)
        out.dx += (-b2 * y).exp() * (self.chi.derivative(x) + b1 * self.chi.value(x));
        Ok(out)
    }

    pub fn intensity(&self, x: f64, y: f64) -> Result<f64> {
        let jet = self.eval(x, y)?;
        Ok(noise_intensity(self.beta1, self.beta2, &jet))
    }

    pub fn solve(&self, grid: GridSpec) -> Result<TelegraphSolution> {
        let w = grid.nx + 1;
        let jets: Vec<PhiJet> = (0..(grid.ny + 1) * w)
            .into_par_iter()
            .map(|i| self.eval((i % w) as f64 * grid.step, (i / w) as f64 * grid.step))
            .collect::<Result<_>>()?;
        let raw: Vec<f64> = jets
            .iter()
            .map(|j| noise_intensity(self.beta1, self.beta2, j))
            .collect();
        let scale = jets
            .iter()
            .map(|j| j.phi.abs() * (j.dx.abs() + j.dy.abs()) + (j.dx * j.dy).abs())
            .fold(1.0f64, f64::max);
        let tol_d = 1e-8 * scale;
        let mut intensity = Vec::with_capacity(raw.len());
        for (i, d) in raw.into_iter().enumerate() {
            if d < -tol_d {
                return Err(Error::NegativeIntensity {
                    x: (i % w) as f64 * grid.step,
                    y: (i / w) as f64 * grid.step,
                    value: d,
                });
            }
            intensity.push(d.max(0.0));
        }
        Ok(TelegraphSolution {
            grid,
            beta1: self.beta1,
            beta2: self.beta2,
            phi: jets.iter().map(|j| j.phi).collect(),
            dx: jets.iter().map(|j| j.dx).collect(),
            dy: jets.iter().map(|j| j.dy).collect(),
            intensity,
        })
    }
}

/// `Phi`, its gradients and `D` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct TelegraphSolution {
    pub grid: GridSpec,
    pub beta1: f64,
    pub beta2: f64,
    phi: Vec<f64>,
    dx: Vec<f64>,
    dy: Vec<f64>,
    intensity: Vec<f64>,
}

impl TelegraphSolution {
    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.grid.nx + 1) + i
    }

    pub fn phi(&self, i: usize, j: usize) -> f64 {
        self.phi[self.idx(i, j)]
    }

    /// `(Phi_x, Phi_y)` at node `(i, j)`.
    pub fn gradient(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.idx(i, j);
        (self.dx[k], self.dy[k])
    }

    pub fn intensity(&self, i: usize, j: usize) -> f64 {
        self.intensity[self.idx(i, j)]
    }

    /// `log_base Phi`; with `base = q^L` this is the limit of `H / L`.
    pub fn log_field(&self, base: f64) -> Vec<f64> {
        let lb = base.ln();
        self.phi.iter().map(|p| p.ln() / lb).collect()
    }

    /// Sup over interior nodes of the centred-difference telegraph residual.
    pub fn telegraph_residual(&self) -> f64 {
        let h = self.grid.step;
        let mut worst = 0.0f64;
        for j in 1..self.grid.ny {
            for i in 1..self.grid.nx {
                let pxy = (self.phi(i + 1, j + 1) - self.phi(i + 1, j - 1) - self.phi(i - 1, j + 1)
                    + self.phi(i - 1, j - 1))
                    / (4.0 * h * h);
                let px = (self.phi(i + 1, j) - self.phi(i - 1, j)) / (2.0 * h);
                let py = (self.phi(i, j + 1) - self.phi(i, j - 1)) / (2.0 * h);
                worst = worst.max((pxy + self.beta2 * px + self.beta1 * py).abs());
            }
        }
        worst
    }

    /// Rows `x, y, phi, phi_x, phi_y, D`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "phi", "phi_x", "phi_y", "D"])?;
        for j in 0..=self.grid.ny {
            for i in 0..=self.grid.nx {
                let k = self.idx(i, j);
                w.serialize((
                    i as f64 * self.grid.step,
                    j as f64 * self.grid.step,
                    self.phi[k],
                    self.dx[k],
                    self.dy[k],
                    self.intensity[k],
                ))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RecurrenceCoefficients;
    use crate::params::ModelParams;

    fn step_problem(extent: f64) -> TelegraphProblem {
        let (b1, b2) = (2.0, 1.0);
        TelegraphProblem::new(
            b1,
            b2,
            BoundaryProfile::constant(1.0, extent),
            BoundaryProfile::exponential(1.0, b1 - b2, extent),
            extent,
            extent,
            TelegraphOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn constants_solve_the_equation() {
        let p = TelegraphProblem::new(
            2.0,
            1.0,
            BoundaryProfile::constant(1.0, 2.0),
            BoundaryProfile::constant(1.0, 2.0),
            2.0,
            2.0,
            TelegraphOptions::default(),
        )
        .unwrap();
        let sol = p.solve(GridSpec::square(1.0 / 8.0, 2.0)).unwrap();
        for j in 0..=16 {
            for i in 0..=16 {
                assert!((sol.phi(i, j) - 1.0).abs() < 1e-8, "{}", sol.phi(i, j));
                let (gx, gy) = sol.gradient(i, j);
                assert!(gx.abs() < 1e-8 && gy.abs() < 1e-8);
                assert!(sol.intensity(i, j).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn reproduces_boundary_data() {
        let p = step_problem(1.0);
        for k in 0..=8 {
            let t = k as f64 / 8.0;
            let bottom = p.eval(t, 0.0).unwrap();
            assert!((bottom.phi - 1.0).abs() < 1e-10);
            let left = p.eval(0.0, t).unwrap();
            assert!((left.phi - t.exp()).abs() < 1e-10);
            assert!((left.dy - t.exp()).abs() < 1e-9, "{} vs {}", left.dy, t.exp());
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = step_problem(1.0);
        let h = 1e-4;
        for &(x, y) in &[(0.3, 0.4), (0.7, 0.2), (0.5, 0.9)] {
            let jet = p.eval(x, y).unwrap();
            let fx = (p.eval(x + h, y).unwrap().phi - p.eval(x - h, y).unwrap().phi) / (2.0 * h);
            let fy = (p.eval(x, y + h).unwrap().phi - p.eval(x, y - h).unwrap().phi) / (2.0 * h);
            assert!((jet.dx - fx).abs() < 1e-6, "{} vs {fx}", jet.dx);
            assert!((jet.dy - fy).abs() < 1e-6, "{} vs {fy}", jet.dy);
        }
    }

    #[test]
    fn agrees_with_the_discrete_scheme() {
        // Deterministic four-point recurrence at L = 512 fed the same boundary data.
        let l = 512usize;
        let params = ModelParams::new(l as u32, 2.0, 1.0).unwrap();
        let c = RecurrenceCoefficients::from_params(&params);
        let n = l + 1;
        let mut grid = vec![0.0; n * n];
        for x in 0..n {
            grid[x] = 1.0;
        }
        for y in 0..n {
            grid[y * n] = (y as f64 / l as f64).exp();
        }
        for y in 1..n {
            for x in 1..n {
                grid[y * n + x] = c.propagate(grid[y * n + x - 1], grid[(y - 1) * n + x], grid[(y - 1) * n + x - 1]);
            }
        }
        let sol = step_problem(1.0).solve(GridSpec::square(1.0 / 16.0, 1.0)).unwrap();
        let mut worst = 0.0f64;
        for j in 0..=16 {
            for i in 0..=16 {
                let d = grid[(j * 32) * n + i * 32] - sol.phi(i, j);
                worst = worst.max(d.abs());
            }
        }
        assert!(worst <= 2e-2, "{worst}");
    }

    #[test]
    fn linear_in_boundary_data() {
        let extent = 1.0;
        let chi1 = BoundaryProfile::constant(1.0, extent);
        let psi1 = BoundaryProfile::exponential(1.0, 1.0, extent);
        let chi2 = BoundaryProfile::analytic(|t| 2.0 + t * t, |t| 2.0 * t, extent);
        let psi2 = BoundaryProfile::analytic(|t| 2.0 + t.sin(), |t| t.cos(), extent);
        // these data give D < 0 in places, so compare pointwise values
        let problem = |chi: BoundaryProfile, psi: BoundaryProfile| {
            TelegraphProblem::new(2.0, 1.0, chi, psi, extent, extent, TelegraphOptions::default()).unwrap()
        };
        let p1 = problem(chi1.clone(), psi1.clone());
        let p2 = problem(chi2.clone(), psi2.clone());
        let p12 = problem(chi1.sum(&chi2).unwrap(), psi1.sum(&psi2).unwrap());
        for j in 0..=4 {
            for i in 0..=4 {
                let (x, y) = (0.25 * i as f64, 0.25 * j as f64);
                let (a, b, c) = (p1.eval(x, y).unwrap(), p2.eval(x, y).unwrap(), p12.eval(x, y).unwrap());
                assert!((c.phi - a.phi - b.phi).abs() < 1e-10);
                assert!((c.dx - a.dx - b.dx).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn intensity_symmetry_under_axis_swap() {
        let extent = 1.0;
        let chi = BoundaryProfile::analytic(|t| 1.0 + 0.5 * t, |_| 0.5, extent);
        let psi = BoundaryProfile::exponential(1.0, 0.8, extent);
        let a = TelegraphProblem::new(
            2.0,
            1.0,
            chi.clone(),
            psi.clone(),
            extent,
            extent,
            TelegraphOptions::default(),
        )
        .unwrap();
        let b = TelegraphProblem::new(1.0, 2.0, psi, chi, extent, extent, TelegraphOptions::default()).unwrap();
        for &(x, y) in &[(0.2, 0.7), (0.9, 0.4), (0.5, 0.5)] {
            let da = a.intensity(x, y).unwrap();
            let db = b.intensity(y, x).unwrap();
            assert!((da - db).abs() < 1e-9 * (1.0 + da.abs()), "{da} vs {db}");
        }
    }

    #[test]
    fn step_intensity_is_positive() {
        let p = step_problem(1.0);
        let d = p.intensity(1.0, 1.0).unwrap();
        assert!(d > 0.0, "{d}");
    }

    #[test]
    fn rejects_incompatible_corner() {
        let r = TelegraphProblem::new(
            2.0,
            1.0,
            BoundaryProfile::constant(1.0, 1.0),
            BoundaryProfile::constant(1.1, 1.0),
            1.0,
            1.0,
            TelegraphOptions::default(),
        );
        assert!(matches!(r, Err(Error::IncompatibleCorner { .. })));
    }

    #[test]
    fn sampled_profile_interpolates() {
        let p = BoundaryProfile::sampled(0.5, vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(p.value(0.25), 1.5);
        assert_eq!(p.derivative(0.5), 3.0);
        assert_eq!(p.extent(), 1.0);
        assert_eq!(p.lipschitz(), 4.0);
    }
}

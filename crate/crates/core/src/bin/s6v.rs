use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use s6v_core::config::ExperimentConfig;
use s6v_core::fluctuation::FluctuationModel;
use s6v_core::harness::{all_passed, configured_solution, run_clt, run_lln, run_verify, Gate};
use s6v_core::io::{Manifest, OutputDir};
use s6v_core::kernels::{verify_kernel_convergence, KernelTable, QuadratureOptions};
use s6v_core::{sample_configuration, Result};

/// Stochastic six vertex sampler and fluctuation verifier.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// JSON experiment configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the manifest and reports.
    #[arg(long, global = true, default_value = "s6v-out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one configuration on the configured window.
    Sample,
    /// Tabulate the discrete kernel and check its continuum limit.
    Kernels,
    /// Solve the telegraph problem for the configured boundary.
    Telegraph,
    /// Limit covariance at the configured points.
    Covariance,
    /// Law of large numbers sweep.
    Lln,
    /// Gaussian fluctuation experiment.
    Clt,
    /// Exact-identity oracles.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Kernels => "kernels",
            Command::Telegraph => "telegraph",
            Command::Covariance => "covariance",
            Command::Lln => "lln",
            Command::Clt => "clt",
            Command::Verify => "verify",
        }
    }
}

struct Run {
    cfg: ExperimentConfig,
    out: OutputDir,
    format: Format,
}

impl Run {
    /// Full report as JSON, or the flat table as CSV.
    fn emit<T: Serialize, R: Serialize>(&self, name: &str, report: &T, rows: &[R]) -> Result<()> {
        let path = match self.format {
            Format::Json => self.out.write_json(&format!("{name}.json"), report)?,
            Format::Csv => self.out.write_csv(&format!("{name}.csv"), rows)?,
        };
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn gates(&self, gates: &[Gate]) -> Result<bool> {
        for g in gates {
            println!(
                "{:<4} {:<52} {:>12.4e}  {}",
                if g.passed { "PASS" } else { "FAIL" },
                g.name,
                g.measured,
                g.threshold
            );
        }
        match self.format {
            Format::Json => self.out.write_json("gates.json", &gates)?,
            Format::Csv => self.out.write_csv("gates.csv", gates)?,
        };
        Ok(all_passed(gates))
    }
}

#[derive(Serialize)]
struct SiteRow {
    x: usize,
    y: usize,
    height: i32,
    phi: f64,
}

#[derive(Serialize)]
struct KernelRow {
    x: usize,
    y: usize,
    value: f64,
}

#[derive(Serialize)]
struct ConvergenceCsv {
    scale: u32,
    kx: u32,
    ky: u32,
    discrepancy: f64,
    discrete_sup: f64,
    continuum_sup: f64,
}

#[derive(Serialize)]
struct CovarianceRow {
    i: usize,
    j: usize,
    xi: f64,
    yi: f64,
    xj: f64,
    yj: f64,
    lambda: f64,
    lambda_height: f64,
}

#[derive(Serialize)]
struct LlnCsv {
    scale: u32,
    window: usize,
    median_phi_error: f64,
    median_height_error: f64,
    seconds: f64,
}

#[derive(Serialize)]
struct CltCsv {
    x: f64,
    y: f64,
    variance: f64,
    predicted: f64,
    variance_ratio: f64,
    height_variance: f64,
    predicted_height: f64,
    height_ratio: f64,
    skewness: f64,
    excess_kurtosis: f64,
    normality_p: f64,
}

fn sample(run: &Run) -> Result<bool> {
    let cfg = &run.cfg;
    let params = cfg.params()?;
    let n = ExperimentConfig::window(cfg.scale, cfg.extent);
    let bc = cfg.bc.build(n, n)?;
    let s = sample_configuration(&params, &bc, n, n, cfg.seed)?.with_convention(cfg.convention);
    let rows: Vec<SiteRow> = (0..=n)
        .flat_map(|y| (0..=n).map(move |x| (x, y)))
        .map(|(x, y)| SiteRow {
            x,
            y,
            height: s.height(x, y),
            phi: s.phi(x, y),
        })
        .collect();
    #[derive(Serialize)]
    struct Report<'a> {
        window: usize,
        heights: &'a [i32],
        phi: &'a [f64],
    }
    run.emit(
        "sample",
        &Report {
            window: n,
            heights: s.heights(),
            phi: s.phis(),
        },
        &rows,
    )?;
    println!("sampled {n}x{n} at L = {}, H({n}, {n}) = {}", cfg.scale, s.height(n, n));
    Ok(true)
}

fn kernels(run: &Run) -> Result<bool> {
    let cfg = &run.cfg;
    let params = cfg.params()?;
    let n = cfg.verify.kernel_window;
    let table = KernelTable::build(&params, n, n);
    let rows: Vec<KernelRow> = (0..=n)
        .flat_map(|y| (0..=n).map(move |x| (x, y)))
        .map(|(x, y)| KernelRow {
            x,
            y,
            value: table.get(x, y),
        })
        .collect();
    let conv = verify_kernel_convergence(
        cfg.beta1,
        cfg.beta2,
        &cfg.verify.convergence_scales,
        1.0,
        2,
        &QuadratureOptions::default(),
    )?;
    let conv_rows: Vec<ConvergenceCsv> = conv
        .rows
        .iter()
        .map(|r| ConvergenceCsv {
            scale: r.scale,
            kx: r.order.0,
            ky: r.order.1,
            discrepancy: r.discrepancy,
            discrete_sup: r.discrete_sup,
            continuum_sup: r.continuum_sup,
        })
        .collect();
    run.emit("kernel_table", &table.values(), &rows)?;
    run.emit("kernel_convergence", &conv, &conv_rows)?;
    run.gates(&[Gate {
        name: "kernel convergence decreasing".into(),
        passed: conv.strictly_decreasing(),
        measured: conv.non_decreasing.len() as f64,
        threshold: "no orders fail".into(),
    }])
}

fn telegraph(run: &Run) -> Result<bool> {
    let (_, solution) = configured_solution(&run.cfg)?;
    let path = match run.format {
        Format::Csv => {
            let path = run.out.path("telegraph.csv");
            solution.write_csv(run.out.create_file("telegraph.csv")?)?;
            path
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                step: f64,
                nx: usize,
                ny: usize,
                phi: &'a [f64],
                residual: f64,
            }
            let g = solution.grid;
            let phi: Vec<f64> = (0..=g.ny)
                .flat_map(|j| (0..=g.nx).map(move |i| (i, j)))
                .map(|(i, j)| solution.phi(i, j))
                .collect();
            let report = Report {
                step: g.step,
                nx: g.nx,
                ny: g.ny,
                phi: &phi,
                residual: solution.telegraph_residual(),
            };
            run.out.write_json("telegraph.json", &report)?
        }
    };
    eprintln!("wrote {}", path.display());
    println!("telegraph residual {:.3e}", solution.telegraph_residual());
    Ok(true)
}

fn covariance(run: &Run) -> Result<bool> {
    let cfg = &run.cfg;
    let (problem, _) = configured_solution(cfg)?;
    let model = FluctuationModel::from_problem(Arc::clone(&problem), cfg.covariance);
    let lambda = model.covariance(&cfg.points)?;
    let height = model.height_covariance(&lambda)?;
    let n = lambda.dim();
    let pts = &cfg.points;
    let rows: Vec<CovarianceRow> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| CovarianceRow {
            i,
            j,
            xi: pts[i].0,
            yi: pts[i].1,
            xj: pts[j].0,
            yj: pts[j].1,
            lambda: lambda.get(i, j),
            lambda_height: height[i * n + j],
        })
        .collect();
    #[derive(Serialize)]
    struct Report<'a> {
        lambda: &'a s6v_core::fluctuation::CovarianceMatrix,
        lambda_height: &'a [f64],
    }
    run.emit(
        "covariance",
        &Report {
            lambda: &lambda,
            lambda_height: &height,
        },
        &rows,
    )?;
    for (i, p) in pts.iter().enumerate() {
        println!("Lambda at {p:?}: {:.6e}", lambda.get(i, i));
    }
    Ok(true)
}

fn lln(run: &Run) -> Result<bool> {
    let r = run_lln(&run.cfg)?;
    let rows: Vec<LlnCsv> = r
        .rows
        .iter()
        .map(|row| LlnCsv {
            scale: row.scale,
            window: row.window,
            median_phi_error: row.median_phi_error,
            median_height_error: row.median_height_error,
            seconds: row.seconds,
        })
        .collect();
    run.emit("lln", &r, &rows)?;
    run.gates(&r.gates)
}

fn clt(run: &Run) -> Result<bool> {
    let r = run_clt(&run.cfg)?;
    let rows: Vec<CltCsv> = r
        .points
        .iter()
        .map(|p| CltCsv {
            x: p.point.0,
            y: p.point.1,
            variance: p.phi.variance,
            predicted: p.predicted,
            variance_ratio: p.variance_ratio,
            height_variance: p.height.variance,
            predicted_height: p.predicted_height,
            height_ratio: p.height_ratio,
            skewness: p.phi.skewness,
            excess_kurtosis: p.phi.excess_kurtosis,
            normality_p: p.phi.normality_p,
        })
        .collect();
    run.emit("clt", &r, &rows)?;
    run.gates(&r.gates)
}

fn verify(run: &Run) -> Result<bool> {
    let r = run_verify(&run.cfg)?;
    run.emit("verify", &r, &r.moments)?;
    run.gates(&r.gates)
}

fn execute(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(t) = cli.threads {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = OutputDir::create(&cli.out)?;
    let manifest = Manifest::new(cli.command.name(), &cfg, rayon::current_num_threads())?;
    out.write_json("manifest.json", &manifest)?;
    let run = Run {
        cfg,
        out,
        format: cli.format,
    };
    match cli.command {
        Command::Sample => sample(&run),
        Command::Kernels => kernels(&run),
        Command::Telegraph => telegraph(&run),
        Command::Covariance => covariance(&run),
        Command::Lln => lln(&run),
        Command::Clt => clt(&run),
        Command::Verify => verify(&run),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end: solve / verify / bench / deblur.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::deblur::{self, BlurModel};
use crate::error::{Error, Result};
use crate::lstsq::RegularizationParams;
use crate::solver::{self, Preset, SolveReport, SolverConfig, StopReason};
use crate::splitting::{classified_aor_splitting, AorParams, SplittingClass};
use crate::tensor::Tensor3;
use crate::transform::Transform;
use crate::{fixtures, io, random};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PRECHECK: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;

#[derive(Parser)]
#[command(name = "mprod", about = "Tensor M-product solvers and tools", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve A *_M X *_M B = C iteratively.
    Solve(SolveArgs),
    /// Re-derive the bundled reference values and report pass/fail.
    Verify(VerifyArgs),
    /// Sweep presets over random diagonally dominant systems.
    Bench(BenchArgs),
    /// Blur and reconstruct an image.
    Deblur(DeblurArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Left operand A (MT3D).
    #[arg(long)]
    a: PathBuf,
    /// Right operand B (MT3D).
    #[arg(long)]
    b: PathBuf,
    /// Right-hand side C (MT3D).
    #[arg(long)]
    c: PathBuf,
    /// Transform matrix (MMAT1); identity when omitted.
    #[arg(long)]
    m: Option<PathBuf>,
    /// Left preconditioner for method "ptspi" (MT3D); identity when omitted.
    #[arg(long)]
    p1: Option<PathBuf>,
    /// Right preconditioner for method "ptspi" (MT3D); identity when omitted.
    #[arg(long)]
    p2: Option<PathBuf>,
    /// Run configuration (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for x.mt3d and report.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print the full report JSON to stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Print the pass/fail list as JSON.
    #[arg(long)]
    json: bool,
    /// Add this value to every entry of the reference A (test hook).
    #[arg(long, hide = true)]
    perturb: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Sweep specification (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for bench.csv and report.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Base seed for system generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the report JSON to stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DeblurArgs {
    /// Input image (binary PPM/PGM).
    #[arg(long)]
    input: PathBuf,
    /// Transform matrix (MMAT1); identity (facewise) when omitted.
    #[arg(long)]
    m: Option<PathBuf>,
    /// Model and regularization parameters (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for blurred.ppm, reconstructed.ppm, metrics.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Noise seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the metrics JSON to stdout.
    #[arg(long)]
    json: bool,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Deblur(args) => cmd_deblur(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INPUT
        }
    }
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Tspi,
    Aor,
    Ptspi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct RunConfig {
    method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
    omega1: f64,
    omega2: f64,
    kappa1: f64,
    kappa2: f64,
    #[serde(flatten)]
    solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::Tspi,
            preset: None,
            omega1: 1.0,
            omega2: 1.0,
            kappa1: 0.0,
            kappa2: 0.0,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    method: Method,
    params: &'a RunConfig,
    iterations: usize,
    residuals: &'a [f64],
    converged: bool,
    stop_reason: StopReason,
    elapsed_s: f64,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Parse {
        path: dir.display().to_string(),
        message: format!("cannot create output directory: {e}"),
    })
}

fn exit_for(reason: StopReason) -> i32 {
    match reason {
        StopReason::ToleranceMet => EXIT_OK,
        StopReason::PrecheckFailed => EXIT_PRECHECK,
        StopReason::MaxIter => EXIT_MAX_ITER,
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    // The whole manifest is read and validated before any computation.
    let cfg: RunConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => RunConfig::default(),
    };
    cfg.solver.validate()?;
    AorParams { omega: cfg.omega1, kappa: cfg.kappa1 }.validate()?;
    AorParams { omega: cfg.omega2, kappa: cfg.kappa2 }.validate()?;
    let a = io::read_tensor(&args.a)?;
    let b = io::read_tensor(&args.b)?;
    let c = io::read_tensor(&args.c)?;
    let p = a.dims().2;
    let t = match &args.m {
        Some(path) => io::read_transform(path)?,
        None => Transform::identity(p),
    };
    let p1 = args.p1.as_ref().map(io::read_tensor).transpose()?;
    let p2 = args.p2.as_ref().map(io::read_tensor).transpose()?;
    ensure_out_dir(&args.out)?;

    let report = run_solve(&cfg, &a, &b, &c, &t, p1.as_ref(), p2.as_ref())?;

    io::write_tensor(args.out.join("x.mt3d"), &report.x)?;
    let run_report = RunReport {
        method: cfg.method,
        params: &cfg,
        iterations: report.iterations,
        residuals: &report.residual_history,
        converged: report.converged,
        stop_reason: report.stop_reason,
        elapsed_s: report.elapsed,
    };
    let json = serde_json::to_string_pretty(&run_report).expect("serializable report");
    std::fs::write(args.out.join("report.json"), &json).map_err(Error::Io)?;
    if args.json {
        println!("{json}");
    } else {
        let last = report.residual_history.last().copied().unwrap_or(f64::NAN);
        println!(
            "{}: {} after {} iterations, residual {:.3e}",
            method_name(cfg.method),
            if report.converged { "converged" } else { "stopped" },
            report.iterations,
            last
        );
    }
    Ok(exit_for(report.stop_reason))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Tspi => "tspi",
        Method::Aor => "aor",
        Method::Ptspi => "ptspi",
    }
}

fn run_solve(
    cfg: &RunConfig,
    a: &Tensor3,
    b: &Tensor3,
    c: &Tensor3,
    t: &Transform,
    p1: Option<&Tensor3>,
    p2: Option<&Tensor3>,
) -> Result<SolveReport> {
    let params1 = AorParams { omega: cfg.omega1, kappa: cfg.kappa1 };
    let params2 = AorParams { omega: cfg.omega2, kappa: cfg.kappa2 };
    match cfg.method {
        Method::Tspi => {
            let s1 = classified_aor_splitting(a, params1, t)?;
            let s2 = classified_aor_splitting(b, params2, t)?;
            solver::two_step_solve(a, b, c, &s1, &s2, t, &cfg.solver, None)
        }
        Method::Aor => match cfg.preset {
            Some(preset) => solver::preset_solve(a, b, c, t, preset, cfg.omega1, &cfg.solver, None),
            None => solver::aor_tspi_solve(a, b, c, t, params1, params2, &cfg.solver, None),
        },
        Method::Ptspi => {
            let eye_a = t.identity_tensor(a.dims().0);
            let eye_b = t.identity_tensor(b.dims().0);
            let p1 = p1.unwrap_or(&eye_a);
            let p2 = p2.unwrap_or(&eye_b);
            let pa = t.m_product(p1, a)?;
            let bp = t.m_product(b, p2)?;
            let s1 = classified_aor_splitting(&pa, params1, t)?;
            let s2 = classified_aor_splitting(&bp, params2, t)?;
            solver::ptspi_solve(a, b, c, p1, p2, &s1, &s2, t, &cfg.solver, None)
        }
    }
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct Check {
    check: String,
    expected: String,
    actual: String,
    pass: bool,
}

impl Check {
    fn scalar(name: &str, expected: f64, actual: f64, tol: f64) -> Check {
        Check {
            check: name.to_string(),
            expected: format!("{expected:.4}"),
            actual: format!("{actual:.4}"),
            pass: (actual - expected).abs() <= tol,
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let t = fixtures::transform();
    let mut a = fixtures::a();
    if let Some(eps) = args.perturb {
        let (m, n, p) = a.dims();
        for k in 0..p {
            for i in 0..m {
                for j in 0..n {
                    a[(i, j, k)] += eps;
                }
            }
        }
    }
    let b = fixtures::b();
    let pre = fixtures::preconditioner();
    let pa = t.m_product(&pre, &a)?;
    let bp = t.m_product(&b, &pre)?;

    let s1 = crate::splitting::Splitting::from_f(&a, fixtures::f1());
    let s2 = crate::splitting::Splitting::from_f(&b, fixtures::f2());
    let sp1 = crate::splitting::Splitting::from_f(&pa, fixtures::fp1());
    let sp2 = crate::splitting::Splitting::from_f(&bp, fixtures::fp2());

    const RHO_TOL: f64 = 5e-4;
    let mut checks = vec![
        Check::scalar("rho(F1^-1 G1)", fixtures::RHO_F1G1, s1.convergence_radius(&t)?, RHO_TOL),
        Check::scalar("rho(Fp1^-1 Gp1)", fixtures::RHO_FP1GP1, sp1.convergence_radius(&t)?, RHO_TOL),
        Check::scalar("rho(F2^-1 G2)", fixtures::RHO_F2G2, s2.convergence_radius(&t)?, RHO_TOL),
        Check::scalar("rho(Fp2^-1 Gp2)", fixtures::RHO_FP2GP2, sp2.convergence_radius(&t)?, RHO_TOL),
    ];

    const INV_TOL: f64 = 1e-12;
    let a_inv_hat = t.to_hat_raw(&t.inverse(&a)?);
    let b_inv_hat = t.to_hat_raw(&t.inverse(&b)?);
    for (name, got, want) in [
        ("A inverse (hat)", &a_inv_hat, fixtures::expected_a_inverse_hat()),
        ("B inverse (hat)", &b_inv_hat, fixtures::expected_b_inverse_hat()),
    ] {
        let diff = got.max_abs_diff(&want);
        checks.push(Check {
            check: name.to_string(),
            expected: format!("max abs diff <= {INV_TOL:.0e}"),
            actual: format!("{diff:.2e}"),
            pass: diff <= INV_TOL,
        });
    }

    for (name, operand, s) in [
        ("class(F1, G1)", &a, &s1),
        ("class(F2, G2)", &b, &s2),
        ("class(Fp1, Gp1)", &pa, &sp1),
        ("class(Fp2, Gp2)", &bp, &sp2),
    ] {
        let class = crate::splitting::classify(operand, &s.f, &s.g, &t)?;
        let pass = matches!(class, SplittingClass::Regular | SplittingClass::WeakRegular);
        checks.push(Check {
            check: name.to_string(),
            expected: "weak regular (at least)".to_string(),
            actual: format!("{class:?}"),
            pass,
        });
    }

    let all_pass = checks.iter().all(|c| c.pass);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&checks).expect("serializable checks"));
    } else {
        println!("{:<22} {:<28} {:<14} result", "check", "expected", "actual");
        for c in &checks {
            println!(
                "{:<22} {:<28} {:<14} {}",
                c.check,
                c.expected,
                c.actual,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_INPUT })
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Deserialize)]
struct SweepSpec {
    sizes: Vec<usize>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    presets: Vec<String>,
    seeds: u64,
    #[serde(default = "default_depth")]
    depth: usize,
    #[serde(default)]
    solver: SolverConfig,
}

fn default_depth() -> usize {
    3
}

#[derive(Serialize)]
struct BenchCell {
    size: usize,
    preset: String,
    alpha: f64,
    beta: f64,
    mean_iter: f64,
    mean_residual: f64,
    mean_ms: f64,
    iterations: Vec<usize>,
}

fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    let spec: SweepSpec = read_json(&args.config)?;
    if spec.presets.is_empty() {
        return Err(Error::InvalidParameter("preset list is empty".into()));
    }
    for field in [
        ("sizes", spec.sizes.is_empty()),
        ("alphas", spec.alphas.is_empty()),
        ("betas", spec.betas.is_empty()),
    ] {
        if field.1 {
            return Err(Error::InvalidParameter(format!("{} list is empty", field.0)));
        }
    }
    if spec.seeds == 0 {
        return Err(Error::InvalidParameter("seeds must be at least 1".into()));
    }
    let presets: Vec<Preset> = spec
        .presets
        .iter()
        .map(|name| {
            Preset::from_name(name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown preset {name}")))
        })
        .collect::<Result<_>>()?;
    spec.solver.validate()?;
    ensure_out_dir(&args.out)?;

    let mut cells = Vec::new();
    for &size in &spec.sizes {
        // One system per seed, shared by every preset/alpha/beta cell.
        let systems: Vec<_> = (0..spec.seeds)
            .map(|idx| {
                let seed = args
                    .seed
                    .wrapping_add((size as u64).wrapping_mul(0x9E37_79B9))
                    .wrapping_add(idx);
                let mut rng = random::rng(seed);
                let t = random::random_transform(&mut rng, spec.depth);
                let a = random::random_hat_sdd_tensor(&mut rng, size, spec.depth, 1.0, &t);
                let b = random::random_hat_sdd_tensor(&mut rng, size, spec.depth, 1.0, &t);
                let x = random::random_tensor(&mut rng, size, size, spec.depth);
                let c = t
                    .m_product(&t.m_product(&a, &x).expect("square operands"), &b)
                    .expect("square operands");
                (t, a, b, c)
            })
            .collect();
        for (pi, &preset) in presets.iter().enumerate() {
            for &alpha in &spec.alphas {
                for &beta in &spec.betas {
                    let mut iters = Vec::with_capacity(systems.len());
                    let (mut res_sum, mut ms_sum) = (0.0, 0.0);
                    for (t, a, b, c) in &systems {
                        let cfg = SolverConfig { alpha, beta, ..spec.solver };
                        let started = Instant::now();
                        let report = solver::preset_solve(a, b, c, t, preset, 1.0, &cfg, None)?;
                        ms_sum += started.elapsed().as_secs_f64() * 1e3;
                        iters.push(report.iterations);
                        res_sum += report.residual_history.last().copied().unwrap_or(f64::NAN);
                    }
                    let n = systems.len() as f64;
                    cells.push(BenchCell {
                        size,
                        preset: spec.presets[pi].clone(),
                        alpha,
                        beta,
                        mean_iter: iters.iter().sum::<usize>() as f64 / n,
                        mean_residual: res_sum / n,
                        mean_ms: ms_sum / n,
                        iterations: iters,
                    });
                }
            }
        }
    }

    let mut csv = String::from("size,preset,alpha,beta,mean_iter,mean_residual,mean_ms\n");
    for c in &cells {
        csv.push_str(&format!(
            "{},{},{},{},{},{:e},{:.3}\n",
            c.size, c.preset, c.alpha, c.beta, c.mean_iter, c.mean_residual, c.mean_ms
        ));
    }
    std::fs::write(args.out.join("bench.csv"), &csv).map_err(Error::Io)?;
    let json = serde_json::to_string_pretty(&cells).expect("serializable cells");
    std::fs::write(args.out.join("report.json"), &json).map_err(Error::Io)?;
    if args.json {
        println!("{json}");
    } else {
        print!("{csv}");
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- deblur

#[derive(Debug, Deserialize)]
#[serde(default)]
struct DeblurConfig {
    sigma_v: f64,
    b_v: usize,
    deltas: [f64; 3],
    noise_var: f64,
    lambda: f64,
    mu: f64,
    two_sided: bool,
}

impl Default for DeblurConfig {
    fn default() -> Self {
        let model = BlurModel::default();
        DeblurConfig {
            sigma_v: model.sigma_v,
            b_v: model.b_v,
            deltas: model.deltas,
            noise_var: 1e-3,
            lambda: 1e-3,
            mu: 1e-3,
            two_sided: false,
        }
    }
}

#[derive(Serialize)]
struct DeblurMetrics {
    psnr_blurred: f64,
    psnr_reconstructed: f64,
    relative_error_blurred: f64,
    relative_error_reconstructed: f64,
    imag_residue: f64,
}

fn cmd_deblur(args: &DeblurArgs) -> Result<i32> {
    let cfg: DeblurConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => DeblurConfig::default(),
    };
    let model = BlurModel {
        sigma_v: cfg.sigma_v,
        b_v: cfg.b_v,
        deltas: cfg.deltas,
    };
    model.validate()?;
    let reg = RegularizationParams { lambda: cfg.lambda, mu: cfg.mu };
    reg.validate()?;
    let img = io::read_image(&args.input)?;
    let x_true = deblur::image_to_tensor(&img);
    let (m, n, p) = x_true.dims();
    let t = match &args.m {
        Some(path) => io::read_transform(path)?,
        None => Transform::identity(p),
    };
    ensure_out_dir(&args.out)?;

    let (blur_a, blur_b_full) = deblur::build_blur_pair(&model, m, n)?;
    let blur_b = if cfg.two_sided { blur_b_full } else { t.identity_tensor(n) };
    let c_obs = deblur::synthesize_observation(&x_true, &blur_a, &blur_b, &t, cfg.noise_var, args.seed)?;
    let blurred = deblur::clamp01(&c_obs);
    let recon = deblur::reconstruct(&c_obs, &blur_a, &blur_b, &t, reg)?;

    io::write_image(args.out.join("blurred.ppm"), &deblur::tensor_to_image(&blurred)?)?;
    io::write_image(
        args.out.join("reconstructed.ppm"),
        &deblur::tensor_to_image(&recon.x)?,
    )?;

    let true_norm = x_true.frobenius_norm();
    let metrics = DeblurMetrics {
        psnr_blurred: deblur::psnr(&blurred, &x_true)?,
        psnr_reconstructed: deblur::psnr(&recon.x, &x_true)?,
        relative_error_blurred: blurred.sub(&x_true).frobenius_norm() / true_norm,
        relative_error_reconstructed: recon.x.sub(&x_true).frobenius_norm() / true_norm,
        imag_residue: recon.imag_residue,
    };
    let json = serde_json::to_string_pretty(&metrics).expect("serializable metrics");
    std::fs::write(args.out.join("metrics.json"), &json).map_err(Error::Io)?;
    if args.json {
        println!("{json}");
    } else {
        println!(
            "psnr blurred {:.2} dB -> reconstructed {:.2} dB",
            metrics.psnr_blurred, metrics.psnr_reconstructed
        );
    }
    Ok(EXIT_OK)
}

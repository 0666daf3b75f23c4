//! `logconc`: Legendre transforms, mean widths, convex-body computations,
//! verification suites, and volume-ratio experiments from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input errors.

mod manifest;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use logconc::io::{parse_body_spec, parse_experiment_spec, parse_function_spec, FunctionRef};
use logconc::legendre::analytic_conjugate;
use logconc::*;
use manifest::ManifestBuilder;

#[derive(Parser)]
#[command(name = "logconc", version, about = "Convex analysis of log-concave functions")]
struct Cli {
    /// Emit JSON only; suppress the aligned text tables.
    #[arg(long, global = true)]
    json_only: bool,

    /// Worker threads for Monte Carlo batches; 1 keeps runs byte-reproducible.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Quadrature,
    MonteCarlo,
    Radial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BodyOp {
    /// Spherical definition: integral of h_K over the unit sphere.
    MeanWidth,
    /// Dilation-limit definition via Monte Carlo volumes of D + eps K.
    Limit,
    /// Steiner-polynomial fit recovering the quermassintegrals.
    Steiner,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate a potential and write L(phi) as an lcgrid file.
    Legendre {
        /// Function-spec file.
        #[arg(long)]
        spec: PathBuf,
        /// Output grid file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean width of a log-concave function.
    Meanwidth {
        /// Function-spec file.
        #[arg(long)]
        spec: PathBuf,
        /// Use the differential definition (secant slopes of I(eps)).
        #[arg(long)]
        tilde: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo sample count (method = monte-carlo).
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Convex-body mean widths and Steiner fits.
    Bodies {
        /// Body-spec file.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = BodyOp::MeanWidth)]
        op: BodyOp,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite: equality, urysohn, santalo, shannon,
    /// properties, monotone, or all.
    Verify {
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Volume-ratio / low-M* experiment from a config file.
    Lowmstar {
        #[arg(long)]
        config: PathBuf,
        /// Run the low-M* variant (shell cut by f * G) instead of the
        /// finite volume-ratio experiment.
        #[arg(long)]
        low_mstar: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// LOGCONC_SEED env var > command-line flag > config default.
fn effective_seed(flag: Option<u64>, fallback: u64) -> u64 {
    if let Ok(v) = std::env::var("LOGCONC_SEED") {
        if let Ok(s) = v.trim().parse() {
            return s;
        }
    }
    flag.unwrap_or(fallback)
}

fn read_input(path: &Path, mf: &mut ManifestBuilder) -> Result<String> {
    let bytes = std::fs::read(path)?;
    mf.input(path, &bytes);
    String::from_utf8(bytes).map_err(|_| Error::Parse {
        line: 0,
        msg: format!("{} is not UTF-8", path.display()),
    })
}

fn print_table(title: &str, rows: &[(String, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    println!("{title}");
    for (k, v) in rows {
        println!("  {k:<width$}  {v}");
    }
}

fn estimate_meta() -> serde_json::Value {
    json!({
        "value": "estimate; the string \"inf\" encodes +infinity",
        "std_error": "one-sigma statistical error; 0 for deterministic rules",
        "method": "integration backend",
        "n_samples": "samples (monte_carlo) or nodes (quadrature)",
        "seed": "RNG seed, null for deterministic rules",
        "diagnostics": "free-form key/value details (witnesses, tables, flags)",
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Legendre { spec, out } => cmd_legendre(cli, spec, out),
        Command::Meanwidth { spec, tilde, method, seed, samples } => {
            cmd_meanwidth(cli, spec, *tilde, *method, *seed, *samples)
        }
        Command::Bodies { spec, op, samples, seed } => {
            cmd_bodies(cli, spec, *op, *samples, *seed)
        }
        Command::Verify { suite, seed } => cmd_verify(cli, suite, *seed),
        Command::Lowmstar { config, low_mstar } => cmd_lowmstar(cli, config, *low_mstar),
    }
}

fn cmd_legendre(cli: &Cli, spec: &Path, out: &Path) -> Result<ExitCode> {
    let mut mf = ManifestBuilder::new("legendre");
    mf.config("spec", spec.display()).config("out", out.display());
    let text = read_input(spec, &mut mf)?;
    let base = spec.parent().unwrap_or(Path::new("."));
    let f = parse_function_spec(&text, base)?;
    let (grid, provenance): (Grid, String) = match f.phi().repr() {
        Repr::Grid(_) => {
            let sf = support_fn(&f)?;
            let g = sf.as_grid().unwrap().clone();
            (g, sf.provenance().to_string())
        }
        Repr::Radial(p) => {
            let eta = legendre_radial(p)?;
            let rmax = if eta.rmax().is_finite() { eta.rmax() } else { 12.0 };
            let len = 257;
            let g = Grid::sample(vec![0.0], vec![rmax / (len - 1) as f64], vec![len], |x| {
                eta.eval(x[0])
            })?;
            (g, "L(radial profile), sampled on [0, rmax]".to_string())
        }
        Repr::Analytic(a) => {
            let conj = Potential::from_analytic(analytic_conjugate(a));
            let p = logconc::legendre::analytic_to_grid(&conj, 129)?;
            (p.as_grid().unwrap().clone(), "L(analytic), sampled".to_string())
        }
    };
    let mut text_out = format!("lcgrid v1 dim={}\n# provenance={}\n", grid.dim(), provenance);
    text_out.push_str(
        logconc::io::write_grid(&grid)
            .split_once('\n')
            .map(|(_, rest)| rest)
            .unwrap_or(""),
    );
    std::fs::write(out, &text_out)?;
    let report = json!({
        "out": out.display().to_string(),
        "provenance": provenance,
        "shape": grid.shape(),
        "_meta": {
            "out": "written lcgrid file",
            "shape": "output grid nodes per axis",
        },
        "manifest": mf.finish(),
    });
    if !cli.json_only {
        print_table(
            "legendre",
            &[
                ("out".into(), out.display().to_string()),
                ("provenance".into(), provenance),
                ("shape".into(), format!("{:?}", grid.shape())),
            ],
        );
    }
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_meanwidth(
    cli: &Cli,
    spec: &Path,
    tilde: bool,
    method: MethodArg,
    seed: Option<u64>,
    samples: usize,
) -> Result<ExitCode> {
    let mut mf = ManifestBuilder::new("meanwidth");
    let seed = effective_seed(seed, 17);
    mf.config("spec", spec.display())
        .config("tilde", tilde)
        .config("samples", samples)
        .seed(seed);
    let text = read_input(spec, &mut mf)?;
    let f = parse_function_spec(&text, spec.parent().unwrap_or(Path::new(".")))?;
    let rep = if tilde {
        mean_width_tilde(&f, &TildeConfig::default())?
    } else {
        match method {
            MethodArg::Auto => mean_width(&f)?,
            MethodArg::MonteCarlo => {
                let h = support_fn(&f)?;
                let n = f.dim();
                if let Some(w) = h.inf_witness() {
                    EstimateReport::infinite(&w, Method::MonteCarlo)
                } else {
                    let m = GaussianMeasure::new(n);
                    gaussian_expectation(
                        &m,
                        |x| h.eval(x).unwrap(),
                        Method::MonteCarlo,
                        seed,
                        samples,
                    )?
                    .scaled(2.0 / n as f64)
                }
            }
            MethodArg::Quadrature | MethodArg::Radial => {
                let rep = mean_width(&f)?;
                let want = if method == MethodArg::Quadrature {
                    Method::Quadrature
                } else {
                    Method::Radial1d
                };
                if !rep.is_infinite() && rep.method != want {
                    return Err(Error::invalid(
                        "method",
                        "requested backend does not apply to this representation",
                    ));
                }
                rep
            }
        }
    };
    if !cli.json_only {
        let mut rows = vec![
            ("value".to_string(), rep.value.to_string()),
            ("method".to_string(), format!("{:?}", rep.method)),
            ("std_error".to_string(), format!("{:.3e}", rep.std_error)),
        ];
        for (k, v) in rep.diagnostics.iter().take(4) {
            rows.push((k.clone(), v.clone()));
        }
        print_table(if tilde { "mean width (differential)" } else { "mean width" }, &rows);
    }
    let report = json!({
        "report": rep,
        "_meta": estimate_meta(),
        "manifest": mf.finish(),
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bodies(
    cli: &Cli,
    spec: &Path,
    op: BodyOp,
    samples: usize,
    seed: Option<u64>,
) -> Result<ExitCode> {
    let mut mf = ManifestBuilder::new("bodies");
    let seed = effective_seed(seed, 17);
    mf.config("spec", spec.display()).config("samples", samples).seed(seed);
    let text = read_input(spec, &mut mf)?;
    let body = parse_body_spec(&text)?;
    let report = match op {
        BodyOp::MeanWidth => {
            mf.config("op", "mean-width");
            let rep = mean_width_body(&body, seed)?;
            if !cli.json_only {
                print_table(
                    "body mean width",
                    &[
                        ("value".into(), rep.value.to_string()),
                        ("method".into(), format!("{:?}", rep.method)),
                        ("std_error".into(), format!("{:.3e}", rep.std_error)),
                    ],
                );
            }
            json!({ "report": rep, "_meta": estimate_meta(), "manifest": mf.finish() })
        }
        BodyOp::Limit => {
            mf.config("op", "limit");
            let rep = mean_width_body_limit(&body, samples, seed)?;
            if !cli.json_only {
                print_table(
                    "body mean width (dilation limit)",
                    &[
                        ("value".into(), rep.value.to_string()),
                        ("std_error".into(), format!("{:.3e}", rep.std_error)),
                    ],
                );
            }
            json!({ "report": rep, "_meta": estimate_meta(), "manifest": mf.finish() })
        }
        BodyOp::Steiner => {
            mf.config("op", "steiner");
            let diam = body.diameter();
            let radii: Vec<f64> =
                (0..8).map(|k| 0.1 * diam * (10.0_f64).powf(k as f64 / 7.0)).collect();
            let rep = steiner_fit(&body, &radii, samples, seed)?;
            if !cli.json_only {
                let rows: Vec<(String, String)> = rep
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (format!("V_{i}"), format!("{v:.6}")))
                    .chain([(
                        "V1 from mean width".to_string(),
                        format!("{:.6}", rep.v1_from_mean_width),
                    )])
                    .collect();
                print_table("steiner / quermassintegrals", &rows);
            }
            json!({
                "report": rep,
                "_meta": {
                    "coefficients": "quermassintegrals V_0..V_n from the Steiner fit",
                    "fit_residual": "l2 residual of the polynomial fit",
                    "volumes": "Monte Carlo |K + tD| per radius",
                    "volume_errors": "one-sigma errors of the volumes",
                    "v1_from_mean_width": "|D| M*(K) for the V_1 cross-check",
                },
                "manifest": mf.finish(),
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, suite: &str, seed: Option<u64>) -> Result<ExitCode> {
    let mut mf = ManifestBuilder::new("verify");
    let seed = effective_seed(seed, 2024);
    mf.config("suite", suite).seed(seed);
    let rows = verify::run_suite(suite).ok_or_else(|| {
        Error::invalid(
            "suite",
            format!(
                "unknown suite `{suite}` (expected equality|urysohn|santalo|shannon|properties|monotone|all)"
            ),
        )
    })?;
    let all_pass = rows.iter().all(|r| r.passed);
    if !cli.json_only {
        let width = rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
        println!("verify {suite}");
        for r in &rows {
            println!(
                "  {:<width$}  {}  {}",
                r.check,
                if r.passed { "PASS" } else { "FAIL" },
                r.detail
            );
        }
        println!("  => {}", if all_pass { "all checks passed" } else { "FAILURES present" });
    }
    let report = json!({
        "suite": suite,
        "rows": rows,
        "passed": all_pass,
        "_meta": {
            "rows": "per-check outcome with numeric detail",
            "passed": "true iff every row passed",
        },
        "manifest": mf.finish(),
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_lowmstar(cli: &Cli, config: &Path, low_mstar: bool) -> Result<ExitCode> {
    let mut mf = ManifestBuilder::new("lowmstar");
    mf.config("config", config.display()).config("low_mstar", low_mstar);
    let text = read_input(config, &mut mf)?;
    let spec = parse_experiment_spec(&text)?;
    let mut cfg = spec.config.clone();
    cfg.seed = effective_seed(None, cfg.seed);
    mf.seed(cfg.seed);
    let f = match &spec.function {
        FunctionRef::Counterexample => counterexample_potential(spec.n)?,
        FunctionRef::SpecPath(rel) => {
            let path = config.parent().unwrap_or(Path::new(".")).join(rel);
            let ftext = read_input(&path, &mut mf)?;
            let f = parse_function_spec(&ftext, path.parent().unwrap_or(Path::new(".")))?;
            if f.dim() != spec.n {
                return Err(Error::invalid(
                    "n",
                    format!("config says n = {}, function has dim {}", spec.n, f.dim()),
                ));
            }
            f
        }
    };
    let report_json = if low_mstar {
        let rep = low_mstar_experiment(&f, &cfg)?;
        if !cli.json_only {
            print_table(
                "low-M* experiment",
                &[
                    ("M*(f)".into(), rep.f_mean_width.value.to_string()),
                    ("M*(h)".into(), rep.h_mean_width.value.to_string()),
                    ("V(h)".into(), format!("{:.6}", rep.v_h)),
                    ("V(h) <= sqrt(e)".into(), rep.v_h_bound_ok.to_string()),
                    ("max_c on f".into(), format!("{:.6}", rep.max_c_f)),
                    ("bound holds".into(), rep.bound_holds.to_string()),
                ],
            );
        }
        json!({
            "report": rep,
            "_meta": lowmstar_meta(),
            "manifest": mf.finish(),
        })
    } else {
        let rep = finite_volume_ratio_experiment(&f, &cfg)?;
        if !cli.json_only {
            print_table(
                "finite volume-ratio experiment",
                &[
                    ("V(f)".into(), format!("{:.6}", rep.volume_ratio)),
                    ("max_c".into(), format!("{:.6}", rep.summary.max_c)),
                    ("trials".into(), rep.per_trial.len().to_string()),
                    ("empty shell".into(), rep.empty_shell.to_string()),
                ],
            );
        }
        json!({
            "report": rep,
            "_meta": lowmstar_meta(),
            "manifest": mf.finish(),
        })
    };
    println!("{}", serde_json::to_string_pretty(&report_json).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn lowmstar_meta() -> serde_json::Value {
    json!({
        "volume_ratio": "V = (int f / int G)^{1/n}",
        "per_trial.max_c": "smallest c with f <= (c . G) at every sampled shell point",
        "per_trial.shell_count": "accepted shell samples",
        "per_beta": "level-set in/circumradius along the beta net",
        "summary.pass_fraction": "fraction of subspaces with max_c <= [C_probe V]^{2/(1-lambda)}",
        "beta_net": "eps = beta_0 < ... < beta_N = M with ratios <= 2",
    })
}

use logconc::error::{Error, Result};

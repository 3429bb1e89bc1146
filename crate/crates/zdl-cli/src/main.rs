//! zdl: evaluate Hardy-Z derivatives, run mollified mean-square windows,
//! locate zeros and execute the verification suites.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric-audit failure,
//! 4 resource budget exceeded.

mod checkpoint;
mod config;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{GridSpec, JobConfig};
use std::io::Write;
use std::path::PathBuf;
use zdl_core::hardy::{eta_k, z_exact};
use zdl_core::meansquare::{
    integrate_jz_resumable, main_term_thm0, main_term_thm4, mean_square_report,
    paper_error_scale, MeanSquareReport,
};
use zdl_core::mollifier::{DirichletPolynomial, WindowSpec};
use zdl_core::zerolab::{enumerate_zeros, find_zk_zeros, RectBox, ZeroFunction, ZeroRecord};
use zdl_core::{verify, C64, Error as CoreError};

#[derive(Parser)]
#[command(name = "zdl", version, about = "Hardy Z-function derivative laboratory")]
struct Cli {
    /// JSON job configuration; explicit flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output file (CSV or JSON depending on the command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Clone)]
struct WindowArgs {
    /// Window start T.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Window exponent a (H = T^a).
    #[arg(long)]
    a: Option<f64>,
    /// Mollifier exponent theta (X = T^theta).
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Use the standard mollifier coefficients mu(n)(1 - log n/log X).
    #[arg(long)]
    mollifier: bool,
    /// CSV file with explicit coefficients (header n,re,im).
    #[arg(long)]
    coefficients: Option<PathBuf>,
    /// Accept coefficients beyond the n^eps size gate.
    #[arg(long)]
    coeff_gate_override: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Z^(k)(t) and eta_k(1/2+it) at the requested points.
    Eval {
        /// Evaluation points (repeatable or comma-separated).
        #[arg(long = "t", value_delimiter = ',')]
        points: Vec<f64>,
        /// Derivative orders (default 0).
        #[arg(long = "k", value_delimiter = ',')]
        k_orders: Vec<usize>,
    },
    /// One mean-square window: numeric integral, main term, ratio.
    Meansquare {
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Closed-form main terms only (no quadrature).
    MainTerm {
        #[command(flatten)]
        window: WindowArgs,
        /// Which engine: thm0 (diagonal) or thm4 (general pair).
        #[arg(long, default_value = "thm4")]
        kind: String,
    },
    /// Locate zeros: a t-range scan of Z^(k), or a rectangle search.
    Zeros {
        /// Which function: z, zeta, or eta.
        #[arg(long, default_value = "z")]
        function: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        /// Rectangle "smin,smax,tmin,tmax" for winding enumeration.
        #[arg(long = "box", value_delimiter = ',')]
        rect: Option<Vec<f64>>,
    },
    /// Grid sweep of mean-square cells with panel-block checkpointing.
    Sweep {
        /// Checkpoint file (JSON lines); resumed if it exists.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run a named verification suite.
    Verify {
        /// identities | afe | moments | mollified | parity | mainterms |
        /// oscillatory | zerolab | lemmas | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<CoreError>()
                .map(|c| c.exit_code())
                .unwrap_or(1);
            std::process::exit(code);
        }
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn build_poly(cfg: &JobConfig) -> Result<DirichletPolynomial> {
    if let Some(path) = &cfg.coefficients {
        return Ok(DirichletPolynomial::read_csv_file(
            path,
            cfg.coeff_gate_override.unwrap_or(false),
        )?);
    }
    if cfg.mollifier.unwrap_or(false) {
        let t = cfg
            .t
            .ok_or_else(|| CoreError::Validation("mollifier needs T".into()))?;
        let theta = cfg
            .theta
            .ok_or_else(|| CoreError::Validation("mollifier needs theta".into()))?;
        return Ok(DirichletPolynomial::build_mollifier(t, theta)?);
    }
    Ok(DirichletPolynomial::unit())
}

fn window_from(cfg: &JobConfig) -> Result<WindowSpec> {
    let t = cfg
        .t
        .ok_or_else(|| CoreError::Validation("missing window start T".into()))?;
    let a = cfg
        .a
        .ok_or_else(|| CoreError::Validation("missing window exponent a".into()))?;
    Ok(WindowSpec::new(t, a, cfg.theta.unwrap_or(0.0))?)
}

fn merge_window_args(cfg: JobConfig, w: &WindowArgs) -> JobConfig {
    cfg.merged_with(JobConfig {
        t: w.t,
        a: w.a,
        theta: w.theta,
        k1: w.k1,
        k2: w.k2,
        mollifier: if w.mollifier { Some(true) } else { None },
        coefficients: w.coefficients.clone(),
        coeff_gate_override: if w.coeff_gate_override {
            Some(true)
        } else {
            None
        },
        ..Default::default()
    })
}

fn run(cli: Cli) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    cfg = cfg.merged_with(JobConfig {
        workers: cli.workers,
        out: cli.out.clone(),
        ..Default::default()
    });
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let prec = cfg.precision();
    prec.validate()?;

    match &cli.command {
        Command::Eval { points, k_orders } => {
            let cfg = cfg.merged_with(JobConfig {
                points: if points.is_empty() {
                    None
                } else {
                    Some(points.clone())
                },
                k_orders: if k_orders.is_empty() {
                    None
                } else {
                    Some(k_orders.clone())
                },
                ..Default::default()
            });
            let pts = cfg
                .points
                .clone()
                .ok_or_else(|| CoreError::Validation("eval needs at least one --t".into()))?;
            let ks = cfg.k_orders.clone().unwrap_or_else(|| vec![0]);
            for &t in &pts {
                if t < 2.0 {
                    return Err(anyhow!(CoreError::Validation(format!(
                        "eval requires t >= 2 (got {t})"
                    ))));
                }
            }
            let mut w = writer(&cfg.out)?;
            writeln!(w, "t,k,Z,method,est_error,eta_re,eta_im")?;
            for &t in &pts {
                for &k in &ks {
                    let z = z_exact(t, k, &prec)?;
                    let eta = eta_k(C64::new(0.5, t), k, &prec)?;
                    writeln!(
                        w,
                        "{t:.12e},{k},{:.12e},{},{:.3e},{:.12e},{:.12e}",
                        z.value, z.method, z.est_error, eta.re, eta.im
                    )?;
                }
            }
            Ok(0)
        }

        Command::Meansquare { window } => {
            let cfg = merge_window_args(cfg, window);
            let w = window_from(&cfg)?;
            let poly = build_poly(&cfg)?;
            let (k1, k2) = (cfg.k1.unwrap_or(0), cfg.k2.unwrap_or(cfg.k1.unwrap_or(0)));
            let rep = mean_square_report(&poly, &w, k1, k2, &prec)?;
            let mut out = writer(&cfg.out)?;
            writeln!(out, "{}", MeanSquareReport::CSV_HEADER)?;
            writeln!(out, "{}", rep.csv_row())?;
            Ok(0)
        }

        Command::MainTerm { window, kind } => {
            let cfg = merge_window_args(cfg, window);
            let w = window_from(&cfg)?;
            let poly = build_poly(&cfg)?;
            let (k1, k2) = (cfg.k1.unwrap_or(0), cfg.k2.unwrap_or(cfg.k1.unwrap_or(0)));
            let v = match kind.as_str() {
                "thm0" => {
                    if k1 != k2 {
                        return Err(anyhow!(CoreError::Validation(
                            "the diagonal engine needs k1 = k2".into()
                        )));
                    }
                    main_term_thm0(&poly, &w, k1)?
                }
                "thm4" => main_term_thm4(&poly, &w, k1, k2)?,
                other => {
                    return Err(anyhow!(CoreError::Validation(format!(
                        "unknown main-term kind '{other}'"
                    ))))
                }
            };
            let mut out = writer(&cfg.out)?;
            writeln!(out, "{}", MeanSquareReport::CSV_HEADER)?;
            let rep = MeanSquareReport {
                t_lo: w.t_lo,
                a: w.a,
                h: w.h,
                theta: w.theta,
                x_len: w.x_len,
                k1,
                k2,
                numeric_integral: f64::NAN,
                main_term: v,
                ratio: f64::NAN,
                paper_error_scale: paper_error_scale(&poly, &w, k1.min(k2)),
                panels: 0,
                samples_per_oscillation: f64::NAN,
            };
            writeln!(out, "{}", rep.csv_row())?;
            Ok(0)
        }

        Command::Zeros {
            function,
            k,
            t_min,
            t_max,
            rect,
        } => {
            let cfg = cfg.merged_with(JobConfig {
                function: Some(function.clone()),
                t_min: *t_min,
                t_max: *t_max,
                rect: rect.as_ref().map(|v| {
                    let mut a = [0.0; 4];
                    a.copy_from_slice(v);
                    a
                }),
                k1: *k,
                ..Default::default()
            });
            let k = cfg.k1.unwrap_or(0);
            let records: Vec<ZeroRecord> = match (&cfg.rect, cfg.function.as_deref()) {
                (Some(b), Some(name)) if name != "z" => {
                    let f = match name {
                        "zeta" => ZeroFunction::ZetaK(k),
                        "eta" => ZeroFunction::EtaK(k),
                        "Z" | "zk" => ZeroFunction::ZK(k),
                        other => {
                            return Err(anyhow!(CoreError::Validation(format!(
                                "unknown function '{other}'"
                            ))))
                        }
                    };
                    let rb = RectBox::new(b[0], b[1], b[2], b[3])?;
                    enumerate_zeros(&f, &rb, 1e-4, &prec)?
                }
                _ => {
                    let lo = cfg.t_min.ok_or_else(|| {
                        CoreError::Validation("zeros scan needs --t-min/--t-max or --box".into())
                    })?;
                    let hi = cfg
                        .t_max
                        .ok_or_else(|| CoreError::Validation("missing --t-max".into()))?;
                    find_zk_zeros(k, lo, hi, &prec)?
                }
            };
            let mut out = writer(&cfg.out)?;
            writeln!(out, "{}", ZeroRecord::CSV_HEADER)?;
            for r in &records {
                writeln!(out, "{}", r.csv_row())?;
            }
            Ok(0)
        }

        Command::Sweep { checkpoint } => {
            let cfg = cfg.merged_with(JobConfig {
                checkpoint: checkpoint.clone(),
                ..Default::default()
            });
            run_sweep(&cfg)
        }

        Command::Verify { suite } => {
            let suite = cfg.suite.clone().unwrap_or_else(|| suite.clone());
            let reports = verify::run_suite(&suite, &prec)?;
            for r in &reports {
                println!("{}", r.line());
            }
            let all_passed = reports.iter().all(|r| r.passed != Some(false));
            if let Some(path) = &cfg.out {
                let doc = serde_json::json!({
                    "suite": suite,
                    "all_passed": all_passed,
                    "criteria": reports,
                });
                std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

fn run_sweep(cfg: &JobConfig) -> Result<i32> {
    let grid = cfg
        .grid
        .clone()
        .ok_or_else(|| CoreError::Validation("sweep needs a grid in the config".into()))?;
    let prec = cfg.precision();
    let mut ck = match &cfg.checkpoint {
        Some(p) => Some(checkpoint::Checkpoint::open(p)?),
        None => None,
    };
    let cells = expand_grid(&grid);
    let mut rows = Vec::new();
    for (cell_id, (t, a, theta, k1, k2)) in cells.iter().enumerate() {
        let mut run_cell = || -> std::result::Result<MeanSquareReport, CoreError> {
            let w = WindowSpec::new(*t, *a, *theta)?;
            let poly = if *theta > 0.0 {
                DirichletPolynomial::build_mollifier(*t, *theta)?
            } else {
                DirichletPolynomial::unit()
            };
            let mut done: std::collections::HashMap<(usize, usize), f64> = Default::default();
            if let Some(ck) = &ck {
                for ((c, s, b), v) in &ck.done {
                    if *c == cell_id {
                        done.insert((*s, *b), *v);
                    }
                }
            }
            let mut new_blocks: Vec<(usize, usize, f64)> = Vec::new();
            let num = integrate_jz_resumable(
                &poly,
                &w,
                *k1,
                *k2,
                &prec,
                &mut |s, b| done.get(&(s, b)).copied(),
                &mut |(s, b), v| new_blocks.push((s, b, v)),
            )?;
            if let Some(ck) = &mut ck {
                for (s, b, v) in new_blocks {
                    ck.record(cell_id, s, b, v).ok();
                }
            }
            let main = main_term_thm4(&poly, &w, *k1, *k2)?;
            Ok(MeanSquareReport {
                t_lo: w.t_lo,
                a: w.a,
                h: w.h,
                theta: w.theta,
                x_len: w.x_len,
                k1: *k1,
                k2: *k2,
                numeric_integral: num.value,
                main_term: main,
                ratio: if main != 0.0 { num.value / main } else { f64::NAN },
                paper_error_scale: paper_error_scale(&poly, &w, (*k1).min(*k2)),
                panels: num.panels,
                samples_per_oscillation: num.samples_per_oscillation,
            })
        };
        match run_cell() {
            Ok(rep) => rows.push(rep),
            Err(e) => {
                eprintln!("cell {cell_id} (T={t}, a={a}, theta={theta}, k1={k1}, k2={k2}) failed: {e}");
            }
        }
    }
    let mut out = writer(&cfg.out)?;
    writeln!(out, "{}", MeanSquareReport::CSV_HEADER)?;
    for r in &rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(0)
}

fn expand_grid(g: &GridSpec) -> Vec<(f64, f64, f64, usize, usize)> {
    let mut out = Vec::new();
    let ones = |v: &Vec<f64>| if v.is_empty() { vec![0.0] } else { v.clone() };
    let onesk = |v: &Vec<usize>| if v.is_empty() { vec![0] } else { v.clone() };
    for &t in &g.t {
        for &a in &ones(&g.a) {
            for &theta in &ones(&g.theta) {
                for &k1 in &onesk(&g.k1) {
                    for &k2 in &onesk(&g.k2) {
                        out.push((t, a, theta, k1, k2));
                    }
                }
            }
        }
    }
    out
}

use std::fmt::Write as _;

use cantor_frame::frame::{
    assemble_kinf_truncated, assemble_km_closed, assemble_km_filtration, assemble_km_gram_oracle,
    compression_2x2, truncation_error_bound,
};
use cantor_frame::linalg::trace;
use cantor_frame::moments::{moments_recursive, WeightSpec};
use cantor_frame::secular::{simplicity_report, solve_top_eigenvalue_with, TopEigenReport};
use cantor_frame::spectral::{eigh, limit_spectral_data, schatten_partial_sum};
use cantor_frame::{BranchWeights, SymMatrix};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{Format, MatrixArgs, ModeArg, MomentsArgs, SpectrumArgs, SweepArgs, TopeigArgs, Which};
use crate::error::CliError;
use crate::output::{emit, json_string};

pub const MAX_FRAME_DEPTH: usize = 10;
pub const MAX_DENSE_TRUNCATION: usize = 12;
pub const MAX_CLOSED_TRUNCATION: usize = 30;
pub const MAX_MOMENTS_FLOAT: usize = 64;
pub const MAX_MOMENTS_RATIONAL: usize = 32;
pub const MAX_GRID_POINTS: usize = 10_000;
pub const SLOW_ALPHA: f64 = 0.95;
pub const THREADS_ENV: &str = "CANTOR_FRAME_THREADS";

pub fn parse_weight(s: &str) -> Result<WeightSpec, CliError> {
    s.parse::<WeightSpec>()
        .map_err(|e| CliError::usage(format!("--p {s:?}: {e}")))
}

fn warn_slow(p: f64) {
    let alpha = p.max(1.0 - p);
    if alpha > SLOW_ALPHA {
        eprintln!("warning: alpha = {alpha} > {SLOW_ALPHA}; tail bounds shrink slowly at this weight");
    }
}

fn check_frame_depth(m: usize) -> Result<(), CliError> {
    if m > MAX_FRAME_DEPTH {
        return Err(CliError::size(format!(
            "--m {m} exceeds the frame depth limit {MAX_FRAME_DEPTH}"
        )));
    }
    Ok(())
}

/// Truncation limits: closed-form spectra at `p = 1/2`, dense otherwise.
pub fn check_truncation(p: f64, big_m: usize) -> Result<(), CliError> {
    if big_m < 4 {
        return Err(CliError::usage(format!("--M {big_m} is below the minimum 4")));
    }
    let max = if p == 0.5 {
        MAX_CLOSED_TRUNCATION
    } else {
        MAX_DENSE_TRUNCATION
    };
    if big_m > max {
        return Err(CliError::size(format!(
            "--M {big_m} exceeds the limit {max} for p = {p}"
        )));
    }
    Ok(())
}

pub fn which_name(which: Which) -> &'static str {
    match which {
        Which::KmClosed => "km-closed",
        Which::KmGram => "km-gram",
        Which::KmFiltration => "km-filtration",
        Which::Kinf => "kinf",
    }
}

fn assemble(which: Which, p: f64, m: usize) -> Result<SymMatrix, CliError> {
    Ok(match which {
        Which::KmClosed => assemble_km_closed(p, m)?,
        Which::KmGram => assemble_km_gram_oracle(p, m)?,
        Which::KmFiltration => assemble_km_filtration(p, m)?,
        Which::Kinf => assemble_kinf_truncated(p, m)?,
    })
}

pub fn matrix(args: &MatrixArgs) -> Result<(), CliError> {
    let p = parse_weight(&args.p)?.to_f64();
    check_frame_depth(args.m)?;
    if args.format != Format::Csv {
        return Err(CliError::usage("matrix output is coordinate CSV only"));
    }
    warn_slow(p);
    let k = assemble(args.which, p, args.m)?;
    emit(args.out.output.as_deref(), &k.to_csv_string())
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let spec = parse_weight(&args.p)?;
    let p = spec.to_f64();
    check_frame_depth(args.m)?;
    if !(args.r >= 1.0) {
        return Err(CliError::usage(format!("--r {} must be at least 1", args.r)));
    }
    warn_slow(p);
    let k = assemble(args.which, p, args.m)?;
    let sd = eigh(&k)?;
    let content = match args.format {
        Format::Json => {
            let clusters: Vec<_> = sd
                .clusters()
                .iter()
                .map(|g| json!({"value": g.value, "multiplicity": g.multiplicity}))
                .collect();
            json_string(&json!({
                "p": spec.to_json(),
                "depth": args.m,
                "which": which_name(args.which),
                "provenance": k.provenance().tag(),
                "eigenvalues": sd.eigenvalues(),
                "clusters": clusters,
                "rooted_weights": sd.root_weights(),
                "trace": trace(k.entries()),
                "frobenius_sq": schatten_partial_sum(&sd, 2.0)?,
                "schatten": {"r": args.r, "partial_sum": schatten_partial_sum(&sd, args.r)?},
                "tail_bound": k.tail_bound(),
            }))
        }
        Format::Csv => {
            let mut s = String::from("index,eigenvalue,rooted_weight\n");
            for (i, (v, w)) in sd.eigenvalues().iter().zip(sd.root_weights()).enumerate() {
                writeln!(s, "{i},{v},{w}").unwrap();
            }
            s
        }
    };
    emit(args.out.output.as_deref(), &content)
}

pub fn moments(args: &MomentsArgs) -> Result<(), CliError> {
    let spec = parse_weight(&args.p)?;
    let (values, json) = match args.mode {
        ModeArg::Rational => {
            let Some(p) = spec.as_rational() else {
                return Err(CliError::usage(
                    "rational mode needs p as a fraction \"num/den\"",
                ));
            };
            if args.n > MAX_MOMENTS_RATIONAL {
                return Err(CliError::size(format!(
                    "--n {} exceeds {MAX_MOMENTS_RATIONAL} in rational mode",
                    args.n
                )));
            }
            let seq = moments_recursive(p, args.n)?;
            let strings: Vec<String> = seq.values.iter().map(ToString::to_string).collect();
            (strings, seq.to_json(&spec))
        }
        ModeArg::Float => {
            if args.n > MAX_MOMENTS_FLOAT {
                return Err(CliError::size(format!(
                    "--n {} exceeds {MAX_MOMENTS_FLOAT} in float mode",
                    args.n
                )));
            }
            let seq = moments_recursive(&spec.to_f64(), args.n)?;
            let strings: Vec<String> = seq.values.iter().map(ToString::to_string).collect();
            (strings, seq.to_json(&spec))
        }
    };
    let content = match args.format {
        Format::Json => json_string(&json),
        Format::Csv => {
            let mut s = String::from("n,mu\n");
            for (n, v) in values.iter().enumerate() {
                writeln!(s, "{n},{v}").unwrap();
            }
            s
        }
    };
    emit(args.out.output.as_deref(), &content)
}

fn top_report(p: f64, big_m: usize, tol: f64) -> Result<TopEigenReport, CliError> {
    let sd = limit_spectral_data(p, big_m)?;
    let solve = solve_top_eigenvalue_with(&sd, tol)?;
    Ok(TopEigenReport::new(&solve, &simplicity_report(&sd)))
}

pub fn topeig(args: &TopeigArgs) -> Result<(), CliError> {
    let p = parse_weight(&args.p)?.to_f64();
    check_truncation(p, args.big_m)?;
    warn_slow(p);
    let report = top_report(p, args.big_m, args.tol)?;
    let content = match args.format {
        Format::Json => json_string(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => format!(
            "p,lambda_scalar,lambda_direct,tolerance,simple,agree\n{},{},{},{},{},{}\n",
            report.p,
            report.lambda_scalar,
            report.lambda_direct,
            report.tolerance,
            report.simple,
            report.agree
        ),
    };
    emit(args.out.output.as_deref(), &content)
}

/// Grid points `start, start + step, …, <= stop`, rounded to 12 decimals.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::usage(format!("--grid {s:?}: expected start:stop:step"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(stop >= start) {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(CliError::size(format!(
            "grid has {count} points, more than {MAX_GRID_POINTS}"
        )));
    }
    let points: Vec<f64> = (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect();
    if let Some(bad_p) = points.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(CliError::usage(format!(
            "grid point {bad_p} lies outside (0, 1)"
        )));
    }
    Ok(points)
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::usage(format!(
                "{THREADS_ENV}={v:?} is not a positive integer"
            ))),
        },
    }
}

struct SweepRow {
    p: f64,
    top: TopEigenReport,
    lower: f64,
    mu: [f64; 3],
    tail: f64,
}

fn sweep_row(p: f64, big_m: usize, tol: f64) -> Result<SweepRow, CliError> {
    let top = top_report(p, big_m, tol)?;
    let (_, lower) = compression_2x2(p)?;
    let mu = moments_recursive(&p, 3)?.values;
    Ok(SweepRow {
        p,
        top,
        lower,
        mu: [mu[1], mu[2], mu[3]],
        tail: truncation_error_bound(p, big_m)?,
    })
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid)?;
    for &p in &grid {
        BranchWeights::new(p)?;
        check_truncation(p, args.big_m)?;
        warn_slow(p);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        grid.par_iter()
            .map(|&p| sweep_row(p, args.big_m, args.tol))
            .collect::<Result<_, _>>()
    })?;
    rows.sort_by(|a, b| a.p.total_cmp(&b.p));
    let content = match args.format {
        Format::Csv => {
            let mut s = String::from(
                "p,lambda_direct,lambda_scalar,lower_bound,mu1,mu2,mu3,tail_bound\n",
            );
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.p,
                    r.top.lambda_direct,
                    r.top.lambda_scalar,
                    r.lower,
                    r.mu[0],
                    r.mu[1],
                    r.mu[2],
                    r.tail
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "p": r.p,
                        "lambda_direct": r.top.lambda_direct,
                        "lambda_scalar": r.top.lambda_scalar,
                        "lower_bound": r.lower,
                        "mu": r.mu,
                        "tail_bound": r.tail,
                    })
                })
                .collect();
            json_string(&json!({"M": args.big_m, "rows": rows}))
        }
    };
    emit(args.out.output.as_deref(), &content)
}

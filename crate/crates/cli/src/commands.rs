use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use maxvolkit::mtx::read_matrix_market;
use maxvolkit::precond::{precond_stats, solve_via_augmented};
use maxvolkit::random::rng_from_seed;
use maxvolkit::recsys::{
    coverage, diversity, load_ratings, precision_at_n, representatives, split_per_user, PrecisionReport, RatingsFormat,
    Side,
};
use maxvolkit::skeleton::{build_pseudo_skeleton, max_element_trial, select_skeleton, ApproxError};
use maxvolkit::{log_vol2, maxvol, rect_maxvol, HatMode, MaxvolOptions, Method, RectMaxvolOptions};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::stats::{summarize, Summary};
use crate::UsageError;

#[derive(Serialize)]
struct Report<'a, F: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    flags: &'a F,
    result: R,
}

/// Pretty JSON with a trailing newline.
fn render<F: Serialize, R: Serialize>(command: &str, flags: &F, result: R) -> Result<String> {
    let report = Report { command, version: maxvolkit::VERSION, flags, result };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(text)
}

fn read_input(path: &Path) -> Result<maxvolkit::DenseMatrix> {
    read_matrix_market(path).with_context(|| format!("reading {}", path.display()))
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Square => Method::Square,
        MethodArg::Rect => Method::Rect,
    }
}

fn methods(m: MethodOrBoth) -> Vec<Method> {
    match m {
        MethodOrBoth::Square => vec![Method::Square],
        MethodOrBoth::Rect => vec![Method::Rect],
        MethodOrBoth::Both => vec![Method::Square, Method::Rect],
    }
}

/// Writes to `out` when given; otherwise the text is returned for stdout.
fn emit(text: String, out: Option<&Path>) -> Result<Option<String>> {
    match out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

#[derive(Serialize)]
struct SelectionReport {
    row_indices: Vec<usize>,
    k: usize,
    iterations: usize,
    max_abs_coefficient: f64,
    max_row_norm: f64,
    log_volume: f64,
    hat_mode: HatMode,
}

fn selection_report(a: &maxvolkit::DenseMatrix, sel: &maxvolkit::SelectionResult) -> Result<SelectionReport> {
    Ok(SelectionReport {
        row_indices: sel.row_indices.clone(),
        k: sel.k(),
        iterations: sel.iterations,
        max_abs_coefficient: sel.max_abs_coefficient(),
        max_row_norm: sel.max_unselected_row_norm(),
        log_volume: log_vol2(&sel.basis(a))?,
        hat_mode: sel.hat_mode,
    })
}

pub fn run_maxvol(args: &MaxvolArgs) -> Result<Option<String>> {
    let a = read_input(&args.input)?;
    let opts = MaxvolOptions { eps: args.eps, max_iters: args.max_iters, ..Default::default() };
    let sel = maxvol(&a, &opts)?;
    eprintln!("maxvol: {} rows, max |C| = {:.6}, {} swaps", sel.k(), sel.max_abs_coefficient(), sel.iterations);
    emit(render("maxvol", args, selection_report(&a, &sel)?)?, args.out.as_deref())
}

pub fn run_rect(args: &RectArgs) -> Result<Option<String>> {
    let a = read_input(&args.input)?;
    let opts = RectMaxvolOptions {
        min_k: args.min_k,
        max_k: args.max_k,
        identity_hat: args.identity_hat,
        ..RectMaxvolOptions::with_tau(args.tau)
    };
    let sel = rect_maxvol(&a, &opts)?;
    eprintln!("rectmaxvol: K = {}, max row norm = {:.6}", sel.k(), sel.max_unselected_row_norm());
    emit(render("rectmaxvol", args, selection_report(&a, &sel)?)?, args.out.as_deref())
}

#[derive(Serialize)]
struct CurReport {
    row_indices: Vec<usize>,
    col_indices: Vec<usize>,
    error: ApproxError,
}

pub fn run_cur(args: &CurArgs) -> Result<Option<String>> {
    let a = read_input(&args.input)?;
    let (n, m) = a.shape();
    if args.rank == 0 || args.rank > n.min(m) {
        return Err(usage(format!("--rank must lie in 1..={}", n.min(m))));
    }
    let (rows, cols) = select_skeleton(&a, args.rank, method(args.method), args.tau)?;
    let error = build_pseudo_skeleton(&a, &rows, &cols)?.error(&a)?;
    eprintln!("cur: {} rows, {} columns, relative error {:.3e}", rows.len(), cols.len(), error.relative_frobenius);
    Ok(Some(render("cur", args, CurReport { row_indices: rows, col_indices: cols, error })?))
}

#[derive(Serialize)]
struct MaxelemReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    square: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rect: Option<Summary>,
}

pub fn run_maxelem(args: &MaxelemArgs) -> Result<Option<String>> {
    if args.rank == 0 || args.rank > args.n.min(args.m) {
        return Err(usage("--rank must lie in 1..=min(n, m)"));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let which = methods(args.method);
    let ratios: Vec<Vec<f64>> = (0..args.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(args.seed.wrapping_add(t));
            max_element_trial(&mut rng, args.n, args.m, args.rank, &which, args.tau)
        })
        .collect::<maxvolkit::Result<_>>()?;
    let column = |p: usize| -> Vec<f64> { ratios.iter().map(|r| r[p]).collect() };
    let mut report = MaxelemReport { square: None, rect: None };
    for (p, m) in which.iter().enumerate() {
        let summary = summarize(&column(p), args.bins);
        eprintln!("maxelem {}: mean ratio {:.4}, min {:.4}", m.as_str(), summary.mean, summary.min);
        match m {
            Method::Square => report.square = Some(summary),
            Method::Rect => report.rect = Some(summary),
        }
    }
    Ok(Some(render("maxelem", args, report)?))
}

#[derive(Serialize)]
struct SolveReport {
    x: Vec<f64>,
    residual_norm: f64,
}

#[derive(Serialize)]
struct PrecondReport {
    basis_rows: usize,
    coef_norm: f64,
    cond_z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<SolveReport>,
}

pub fn run_precond(args: &PrecondArgs) -> Result<Option<String>> {
    let a = read_input(&args.input)?;
    let rhs = match &args.rhs {
        Some(path) => {
            let b = read_input(path)?;
            if b.shape() != (a.n_rows(), 1) {
                return Err(usage(format!("--rhs must be {} x 1, got {} x {}", a.n_rows(), b.n_rows(), b.n_cols())));
            }
            Some(b.into_vec())
        }
        None => None,
    };
    let mut out = std::collections::BTreeMap::new();
    for m in methods(args.method) {
        let stats = precond_stats(&a, m, args.tau)?;
        let solve = match &rhs {
            Some(b) => {
                let sol = solve_via_augmented(&a, b, m, args.tau)?;
                Some(SolveReport { x: sol.x, residual_norm: sol.residual_norm })
            }
            None => None,
        };
        eprintln!(
            "precond {}: K = {}, |C| = {:.4}, cond(Z) = {:.4}",
            m.as_str(),
            stats.basis_rows,
            stats.coef_norm,
            stats.cond_z
        );
        out.insert(
            m.as_str(),
            PrecondReport {
                basis_rows: stats.basis_rows,
                coef_norm: stats.coef_norm,
                cond_z: stats.cond_z,
                seconds: args.timings.then_some(stats.seconds),
                solve,
            },
        );
    }
    Ok(Some(render("precond", args, out)?))
}

#[derive(Serialize)]
struct RecsysReport {
    n_users: usize,
    n_items: usize,
    n_ratings: usize,
    duplicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    test_ratings: Option<usize>,
    representatives: Vec<usize>,
    representative_ids: Vec<String>,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diversity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<PrecisionReport>,
}

pub fn run_recsys(args: &RecsysArgs) -> Result<Option<String>> {
    let format = match args.format {
        Some(FormatArg::Dat) => RatingsFormat::MovielensDat,
        Some(FormatArg::Csv) => RatingsFormat::Csv,
        None if args.ratings.extension().is_some_and(|e| e == "dat") => RatingsFormat::MovielensDat,
        None => RatingsFormat::Csv,
    };
    let side = match args.side {
        SideArg::Users => Side::Users,
        SideArg::Items => Side::Items,
    };
    if args.precision_at.is_some() && side == Side::Users {
        return Err(usage("--precision-at scores users through representative items; use --side items"));
    }
    if args.test.is_some() && args.precision_at.is_none() {
        return Err(usage("--test requires --precision-at"));
    }
    if !(0.0..1.0).contains(&args.test_fraction) {
        return Err(usage("--test-fraction must lie in [0, 1)"));
    }
    let read = |path: &Path| load_ratings(path, format).with_context(|| format!("reading {}", path.display()));
    let full = read(&args.ratings)?;
    let (train, test) = match (&args.test, args.precision_at) {
        (Some(path), Some(_)) => (full, Some(read(path)?)),
        (None, Some(_)) => {
            let (train, test) = split_per_user(&full, args.test_fraction, args.seed);
            (train, Some(test))
        }
        _ => (full, None),
    };
    let limit = train.n_users().min(train.n_items());
    if args.k == 0 || args.k > limit {
        return Err(usage(format!("--k must lie in 1..={limit}")));
    }
    let reps = representatives(&train, args.k, side, method(args.method), args.tau)?;
    let wants = |m: Metric| args.metrics.contains(&m);
    let precision = match (&test, args.precision_at) {
        (Some(test), Some(n)) => Some(precision_at_n(&train, test, &reps, n, args.good_threshold)?),
        _ => None,
    };
    let report = RecsysReport {
        n_users: train.n_users(),
        n_items: train.n_items(),
        n_ratings: train.ratings().len(),
        duplicates: train.duplicates(),
        test_ratings: test.as_ref().map(|t| t.ratings().len()),
        representative_ids: train.ids(side, &reps),
        count: reps.len(),
        coverage: wants(Metric::Coverage).then(|| coverage(&train, &reps, side)),
        diversity: wants(Metric::Diversity).then(|| diversity(&train, &reps, side)),
        precision,
        representatives: reps,
    };
    eprintln!("recsys: {} representatives", report.count);
    Ok(Some(render("recsys", args, report)?))
}

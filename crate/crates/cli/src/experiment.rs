use anyhow::{bail, Context, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use spca_core::instances::random_psd_unit_entries;
use spca_core::rng::{derive_seed, substream};
use spca_core::solvers::{solve_additive_ptas, solve_approx, solve_exact};
use spca_core::{Budget, Error};

use crate::args::ExperimentArgs;
use crate::report::{RunReport, Session};

const HEADER: [&str; 14] = [
    "trial", "n", "k", "opt", "v1", "v2", "v", "ptas", "ratio_v1", "ratio_v2", "ratio_v", "ptas_gap_over_k",
    "combined_bound", "error",
];

#[derive(Debug, Clone, Serialize)]
struct Row {
    trial: usize,
    n: usize,
    k: usize,
    opt: Option<f64>,
    v1: f64,
    v2: f64,
    v: f64,
    ptas: Option<f64>,
    ratio_v1: Option<f64>,
    ratio_v2: Option<f64>,
    ratio_v: Option<f64>,
    /// `(OPT − PTAS)/k`, to compare against eps.
    ptas_gap_over_k: Option<f64>,
    combined_bound: f64,
    error: String,
}

#[derive(Debug, Serialize)]
struct Summary {
    trials: usize,
    n_min: usize,
    n_max: usize,
    eps: f64,
    with_opt: usize,
    errors: usize,
    min_ratio_v1: Option<f64>,
    min_ratio_v2: Option<f64>,
    min_ratio_v: Option<f64>,
    /// `n_max^{−1/3}`, the weakest combined guarantee over the size range.
    combined_bound: f64,
    max_ptas_gap_over_k: Option<f64>,
    csv: String,
}

fn ratio(v: f64, opt: Option<f64>) -> Option<f64> {
    opt.filter(|&o| o > 0.0).map(|o| v / o)
}

fn trial(i: usize, args: &ExperimentArgs, seed: u64, budget: &Budget) -> Result<Row, Error> {
    let mut rng = substream(seed, "experiment", i as u64);
    let n = rng.random_range(args.n_min..=args.n_max);
    let k = rng.random_range(1..=n);
    let a = random_psd_unit_entries(n, &mut rng);
    let c = solve_approx(&a, k)?;
    let mut errors = Vec::new();
    let opt = match solve_exact(&a, k, budget) {
        Ok(s) => Some(s.value),
        Err(e) if e.is_guard() => {
            log::warn!("trial {i}: exact solver skipped: {e}");
            errors.push(format!("exact: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let ptas = if args.no_ptas {
        None
    } else {
        let ptas_budget = Budget {
            net_points: args.net_points,
            ..*budget
        };
        match solve_additive_ptas(&a, k, args.eps, derive_seed(seed, "experiment-ptas", i as u64), &ptas_budget) {
            Ok(p) => Some(p.solution.value),
            Err(e @ (Error::SketchFailed { .. } | Error::BudgetExceeded { .. } | Error::SizeGuard(_))) => {
                log::warn!("trial {i}: PTAS skipped: {e}");
                errors.push(format!("ptas: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    };
    Ok(Row {
        trial: i,
        n,
        k,
        opt,
        v1: c.v1,
        v2: c.v2,
        v: c.solution.value,
        ptas,
        ratio_v1: ratio(c.v1, opt),
        ratio_v2: ratio(c.v2, opt),
        ratio_v: ratio(c.solution.value, opt),
        ptas_gap_over_k: opt.zip(ptas).map(|(o, p)| (o - p) / k as f64),
        combined_bound: (n as f64).cbrt().recip(),
        error: errors.join("; "),
    })
}

fn fold_min(it: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    it.flatten().reduce(f64::min)
}

pub fn run(args: &ExperimentArgs, budget: &Budget, session: Session, seed: u64) -> Result<RunReport> {
    if args.n_min == 0 || args.n_min > args.n_max {
        bail!(Error::InvalidArgument(format!(
            "need 1 <= n-min <= n-max, got {}..{}",
            args.n_min, args.n_max
        )));
    }
    if !(args.eps > 0.0 && args.eps < 1.0) {
        bail!(Error::InvalidArgument(format!("eps must lie in (0, 1), got {}", args.eps)));
    }
    let rows: Vec<Row> = (0..args.trials)
        .into_par_iter()
        .map(|i| trial(i, args, seed, budget))
        .collect::<Result<_, _>>()?;

    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&args.csv)
        .with_context(|| format!("cannot write {}", args.csv.display()))?;
    w.write_record(HEADER)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    let summary = Summary {
        trials: rows.len(),
        n_min: args.n_min,
        n_max: args.n_max,
        eps: args.eps,
        with_opt: rows.iter().filter(|r| r.opt.is_some()).count(),
        errors: rows.iter().filter(|r| !r.error.is_empty()).count(),
        min_ratio_v1: fold_min(rows.iter().map(|r| r.ratio_v1)),
        min_ratio_v2: fold_min(rows.iter().map(|r| r.ratio_v2)),
        min_ratio_v: fold_min(rows.iter().map(|r| r.ratio_v)),
        combined_bound: (args.n_max as f64).cbrt().recip(),
        max_ptas_gap_over_k: rows.iter().filter_map(|r| r.ptas_gap_over_k).reduce(f64::max),
        csv: args.csv.display().to_string(),
    };
    session.finish(serde_json::json!({ "summary": summary, "rows": rows }))
}

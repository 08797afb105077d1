use anyhow::{bail, Result};
use serde::Serialize;

use spca_core::expansion::parse_edge_list;
use spca_core::hardness::parse_dimacs;
use spca_core::verify::{check_group, run_check, CheckOptions, CheckReport, CHECKS};
use spca_core::Budget;

use crate::args::VerifyArgs;
use crate::report::{RunReport, Session};

#[derive(Debug, Serialize)]
struct VerifyResults {
    passed: bool,
    checks: Vec<CheckReport>,
}

fn selected(args: &VerifyArgs) -> Result<Vec<&'static str>> {
    for name in &args.checks {
        if check_group(name).is_none() {
            bail!(spca_core::Error::InvalidArgument(format!(
                "unknown check `{name}`; known checks: {}",
                CHECKS.join(", ")
            )));
        }
    }
    if let Some(g) = &args.group {
        if !CHECKS.iter().any(|c| check_group(c) == Some(g.as_str())) {
            bail!(spca_core::Error::InvalidArgument(format!(
                "unknown group `{g}`; known groups: solvers, hardness, expansion, shortcode"
            )));
        }
    }
    let all = args.checks.is_empty() && args.group.is_none();
    Ok(CHECKS
        .into_iter()
        .filter(|c| all || args.checks.iter().any(|n| n == c) || args.group.as_deref() == check_group(c))
        .collect())
}

/// Runs the selected checks; the boolean is false when any sub-check failed.
pub fn run(args: &VerifyArgs, budget: &Budget, mut session: Session, seed: u64) -> Result<(RunReport, bool)> {
    let names = selected(args)?;
    let mut opts = CheckOptions {
        seed,
        trials: args.trials,
        budget: *budget,
        m: args.m,
        d: args.d,
        eps2: args.eps2,
        eps: args.eps,
        c: args.c,
        s: args.s,
        eta: args.eta,
        delta: args.delta,
        graph: None,
        cnf: None,
    };
    if let Some(path) = &args.graph {
        opts.graph = Some(parse_edge_list(&session.read(path)?)?);
    }
    if let Some(path) = &args.cnf {
        opts.cnf = Some(parse_dimacs(&session.read(path)?)?.cnf);
    }
    let mut checks = Vec::with_capacity(names.len());
    for name in names {
        let r = run_check(name, &opts)?;
        for s in &r.subchecks {
            let tag = match (s.passed, s.skipped) {
                (_, true) => "SKIP",
                (true, _) => "pass",
                (false, _) => "FAIL",
            };
            eprintln!("{tag} {name}: {} [margin {:.3e}] {}", s.name, s.margin, s.detail);
        }
        checks.push(r);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok((session.finish(VerifyResults { passed, checks })?, passed))
}

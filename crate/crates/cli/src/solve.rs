use anyhow::Result;
use serde::Serialize;
use serde_json::json;

use spca_core::linalg::parse_matrix;
use spca_core::solvers::{algorithm1, algorithm2, solve_additive_ptas, solve_approx, solve_exact};
use spca_core::{Budget, SparseSolution};

use crate::args::{Alg, SolveArgs};
use crate::report::{RunReport, Session};

#[derive(Debug, Serialize)]
struct SolveResults {
    alg: &'static str,
    n: usize,
    k: usize,
    value: f64,
    support: Vec<usize>,
    coefficients: Vec<f64>,
    details: serde_json::Value,
}

fn alg_name(alg: Alg) -> &'static str {
    match alg {
        Alg::Exact => "exact",
        Alg::Approx => "approx",
        Alg::Alg1 => "alg1",
        Alg::Alg2 => "alg2",
        Alg::Ptas => "ptas",
    }
}

pub fn run(args: &SolveArgs, budget: &Budget, mut session: Session, seed: u64) -> Result<RunReport> {
    let a = parse_matrix(&session.read(&args.matrix)?)?;
    let k = args.k;
    let (solution, details): (SparseSolution, _) = match args.alg {
        Alg::Exact => (solve_exact(&a, k, budget)?, json!({})),
        Alg::Alg1 => {
            let h = algorithm1(&a, k)?;
            (h.solution, json!({ "guarantee_void": h.guarantee_void }))
        }
        Alg::Alg2 => {
            let h = algorithm2(&a, k)?;
            (h.solution, json!({ "guarantee_void": h.guarantee_void, "lambda1": h.lambda1 }))
        }
        Alg::Approx => {
            let c = solve_approx(&a, k)?;
            let details = json!({
                "guarantee_void": c.guarantee_void,
                "v1": c.v1,
                "v2": c.v2,
                "lambda1": c.lambda1,
                "chosen": c.chosen,
                "combination_holds": c.combination_holds(),
            });
            (c.solution, details)
        }
        Alg::Ptas => {
            let p = solve_additive_ptas(&a, k, args.eps, seed, budget)?;
            let details = json!({
                "eps": args.eps,
                "sketch_value": p.sketch_value,
                "sketch_rank": p.sketch_rank,
                "sketch_deviation": p.sketch_deviation,
                "sketch_attempts": p.sketch_attempts,
                "search_rank": p.search_rank,
                "directions": p.directions,
                "exhaustive": p.exhaustive,
            });
            (p.solution, details)
        }
    };
    log::info!("{}: value {} on support {:?}", alg_name(args.alg), solution.value, solution.support);
    session.finish(SolveResults {
        alg: alg_name(args.alg),
        n: a.n(),
        k,
        value: solution.value,
        support: solution.support,
        coefficients: solution.coefficients,
        details,
    })
}

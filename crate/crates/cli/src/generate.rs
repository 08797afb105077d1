use anyhow::{bail, Result};
use serde::Serialize;

use spca_core::expansion::{parse_edge_list, psd_sse_reduce};
use spca_core::hardness::{build_reduction, parse_dimacs, random_e2sat, regularize_degree, ChainParams, Stage};
use spca_core::linalg::format_matrix;
use spca_core::rng::substream;
use spca_core::shortcode::{build_instance_with, gap_report, ShortCodeParams, DEFAULT_MAX_CODEWORDS};
use spca_core::solvers::solve_exact;
use spca_core::Budget;

use crate::args::{GenerateCommand, SatArgs, ShortcodeArgs, SseArgs};
use crate::report::{sibling, write_json, write_text, RunReport, Session};

pub fn run(cmd: &GenerateCommand, budget: &Budget, session: Session, seed: u64) -> Result<RunReport> {
    match cmd {
        GenerateCommand::Sat(a) => sat(a, session, seed),
        GenerateCommand::Sse(a) => sse(a, session),
        GenerateCommand::Shortcode(a) => shortcode(a, budget, session),
    }
}

#[derive(Debug, Serialize)]
struct Padding {
    original_vars: usize,
    padding_vars: usize,
    padding_clauses: usize,
}

#[derive(Debug, Serialize)]
struct SatMeta {
    schema: u32,
    stage: u8,
    #[serde(flatten)]
    params: ChainParams,
    regularization: Option<Padding>,
    random: bool,
}

fn sat(args: &SatArgs, mut session: Session, seed: u64) -> Result<RunReport> {
    let (mut psi, declared) = match &args.cnf {
        Some(path) => {
            let dim = parse_dimacs(&session.read(path)?)?;
            (dim.cnf, dim.declared_d)
        }
        None => {
            let d = args.degree.unwrap_or(2);
            let mut rng = substream(seed, "generate-sat", 0);
            (random_e2sat(args.vars, d, &mut rng)?, Some(d))
        }
    };
    let mut padding = None;
    if args.regularize {
        let d = args.degree.expect("clap enforces --degree");
        let r = regularize_degree(&psi, d)?;
        padding = Some(Padding {
            original_vars: r.original_vars,
            padding_vars: r.cnf.num_vars() - r.original_vars,
            padding_clauses: r.padding_clauses,
        });
        psi = r.cnf;
    } else if let Some(d) = args.degree.or(declared) {
        psi.check_e2sat(d)?;
    }
    let chain = build_reduction(&psi, args.c, args.s)?;
    let stage = Stage::from_index(args.stage as usize)?;
    write_text(&args.out, &format_matrix(chain.matrix(stage)))?;
    let meta_path = args.meta.clone().unwrap_or_else(|| sibling(&args.out, "meta.json"));
    let meta = SatMeta {
        schema: 1,
        stage: args.stage,
        params: chain.params(psi.clauses().len()),
        regularization: padding,
        random: args.cnf.is_none(),
    };
    write_json(&meta_path, &meta)?;
    session.finish(serde_json::json!({
        "matrix": args.out.display().to_string(),
        "meta": meta_path.display().to_string(),
        "dimension": chain.matrix(stage).n(),
        "meta_contents": meta,
    }))
}

fn sse(args: &SseArgs, mut session: Session) -> Result<RunReport> {
    let g = parse_edge_list(&session.read(&args.graph)?)?;
    let red = psd_sse_reduce(&g, args.eta)?;
    write_text(&args.out, &format_matrix(red.graph.matrix()))?;
    let params_path = args.params.clone().unwrap_or_else(|| sibling(&args.out, "params.json"));
    write_json(&params_path, &red)?;
    session.finish(serde_json::json!({
        "matrix": args.out.display().to_string(),
        "params_file": params_path.display().to_string(),
        "n": g.n(),
        "params": red,
    }))
}

fn shortcode(args: &ShortcodeArgs, budget: &Budget, session: Session) -> Result<RunReport> {
    let params = if args.paper_preset {
        ShortCodeParams::paper_preset(args.m, args.eps2)?
    } else {
        ShortCodeParams::new(args.m, args.d, args.eps2)?
    };
    let inst = build_instance_with(params, DEFAULT_MAX_CODEWORDS)?;
    let exact = if args.exact {
        if params.k_sparse == 0 {
            bail!("k = {} rounds down to 0; nothing to enumerate", params.k);
        }
        Some(solve_exact(&inst.a, params.k_sparse, budget)?.value)
    } else {
        None
    };
    let gap = gap_report(&inst, exact)?;
    write_text(&args.out, &format_matrix(&inst.a))?;
    let report_path = args.report.clone().unwrap_or_else(|| sibling(&args.out, "gap.json"));
    write_json(&report_path, &gap)?;
    session.finish(serde_json::json!({
        "matrix": args.out.display().to_string(),
        "report": report_path.display().to_string(),
        "gap": gap,
    }))
}

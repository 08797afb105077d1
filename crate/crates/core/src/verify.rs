//! Named inequality suites.
//!
//! Each check runs a family of seeded instances through the solvers and
//! generators and compares both sides of the inequalities they are meant to
//! satisfy. A [`CheckReport`] lists one [`SubCheck`] per inequality with the
//! worst margin seen (positive means slack).

use rand::Rng as _;
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::expansion::{
    check_local_cheeger, check_power_expand, expansion, expansion_profile, indicator_value, lazy_power,
    psd_sse_reduce, random_walk_graph, sse_spca_values, Side, WalkGraph, CHECK_TOL,
};
use crate::hardness::{
    build_reduction, gadget_table, legal_vector, max_legal_value, max_pattern_value, random_e2sat, shift_non_psd,
    Cnf, Stage,
};
use crate::instances::{gaussian_psd, random_psd_unit_entries};
use crate::linalg::{is_psd_default, norm2, quad_form, SymMatrix};
use crate::rng::substream;
use crate::shortcode::{build_instance_with, build_sdp_solution, sdp_feasibility, soundness_bound, ShortCodeParams};
use crate::solvers::{algorithm1, algorithm2, meets, solve_additive_ptas, solve_exact, SparseSolution};
use crate::Budget;

pub const SCHEMA_VERSION: u32 = 1;

/// Registered check names.
pub const CHECKS: [&str; 8] = [
    "alg-ratios",
    "gadget",
    "sat-sandwich",
    "power-expand",
    "cheeger",
    "sse-spca",
    "shortcode-gap",
    "ptas-additive",
];

/// Group each check belongs to on the command line.
pub fn check_group(name: &str) -> Option<&'static str> {
    Some(match name {
        "alg-ratios" | "ptas-additive" => "solvers",
        "gadget" | "sat-sandwich" => "hardness",
        "power-expand" | "cheeger" | "sse-spca" => "expansion",
        "shortcode-gap" => "shortcode",
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    /// Worst `lhs − rhs` over all cases (for an upper bound, `rhs − lhs`).
    pub margin: f64,
    pub cases: usize,
    pub violations: usize,
    pub skipped: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    pub check: String,
    pub passed: bool,
    pub subchecks: Vec<SubCheck>,
}

/// Accumulates cases of one inequality.
#[derive(Debug, Clone)]
struct Tally {
    name: String,
    margin: f64,
    cases: usize,
    violations: usize,
    detail: String,
    skipped: bool,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            margin: f64::INFINITY,
            cases: 0,
            violations: 0,
            detail: String::new(),
            skipped: false,
        }
    }

    /// Records a case with the given margin and verdict.
    fn record(&mut self, margin: f64, ok: bool) {
        self.cases += 1;
        if margin.is_nan() {
            self.margin = f64::NAN;
        } else if !self.margin.is_nan() {
            self.margin = self.margin.min(margin);
        }
        if !ok {
            self.violations += 1;
        }
    }

    /// `lhs ≥ rhs` with the relative slack of [`meets`].
    fn at_least(&mut self, lhs: f64, rhs: f64) {
        self.record(lhs - rhs, meets(lhs, rhs));
    }

    /// `lhs ≤ rhs`, same slack.
    fn at_most(&mut self, lhs: f64, rhs: f64) {
        self.record(rhs - lhs, meets(rhs, lhs));
    }

    /// `|lhs − rhs| ≤ tol`.
    fn close(&mut self, lhs: f64, rhs: f64, tol: f64) {
        let gap = (lhs - rhs).abs();
        self.record(tol - gap, gap <= tol);
    }

    fn flag(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { -1.0 }, ok);
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn finish(self) -> SubCheck {
        let detail = if self.detail.is_empty() {
            format!("{} violations in {} cases", self.violations, self.cases)
        } else {
            format!("{} ({} violations in {} cases)", self.detail, self.violations, self.cases)
        };
        SubCheck {
            name: self.name,
            passed: self.skipped || self.violations == 0,
            margin: if self.cases == 0 { 0.0 } else { self.margin },
            cases: self.cases,
            violations: self.violations,
            skipped: self.skipped,
            detail,
        }
    }
}

fn report(check: &str, tallies: Vec<Tally>) -> CheckReport {
    let subchecks: Vec<SubCheck> = tallies.into_iter().map(Tally::finish).collect();
    CheckReport {
        schema: SCHEMA_VERSION,
        check: check.into(),
        passed: subchecks.iter().all(|s| s.passed),
        subchecks,
    }
}

impl CheckReport {
    pub fn sub(&self, name: &str) -> Option<&SubCheck> {
        self.subchecks.iter().find(|s| s.name == name)
    }
}

/// Inputs shared by the checks. Absent fields fall back to each check's
/// defaults.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub seed: u64,
    pub trials: Option<usize>,
    pub budget: Budget,
    pub m: usize,
    pub d: usize,
    pub eps2: f64,
    pub eps: f64,
    pub c: f64,
    pub s: f64,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub graph: Option<WalkGraph>,
    pub cnf: Option<Cnf>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: None,
            budget: Budget::default(),
            m: 2,
            d: 1,
            eps2: 1.0 / 20.0,
            eps: 0.25,
            c: 0.9,
            s: 0.8,
            eta: None,
            delta: None,
            graph: None,
            cnf: None,
        }
    }
}

pub fn run_check(name: &str, opts: &CheckOptions) -> Result<CheckReport> {
    match name {
        "alg-ratios" => alg_ratios(opts.trials.unwrap_or(200), opts.seed, &opts.budget),
        "gadget" => Ok(gadget()),
        "sat-sandwich" => sat_sandwich(opts),
        "power-expand" => power_expand(opts),
        "cheeger" => cheeger(opts),
        "sse-spca" => sse_spca(opts),
        "shortcode-gap" => shortcode_gap(opts.m, opts.d, opts.eps2, &opts.budget),
        "ptas-additive" => ptas_additive(opts.trials.unwrap_or(20), opts.seed, opts.eps, &opts.budget),
        other => Err(Error::InvalidArgument(format!(
            "unknown check `{other}`; known checks: {}",
            CHECKS.join(", ")
        ))),
    }
}

fn solution_valid(sol: &SparseSolution, a: &SymMatrix, k: usize) -> bool {
    let q = quad_form(a, &sol.dense()).unwrap_or(f64::NAN);
    sol.support.len() <= k && (sol.norm() - 1.0).abs() <= 1e-12 && (q - sol.value).abs() <= 1e-9 * (1.0 + q.abs())
}

/// Instance `i` of the ratio suite: PSD, `n ∈ [4, 12]`, random rank.
pub fn ratio_instance(seed: u64, i: usize) -> SymMatrix {
    let mut rng = substream(seed, "alg-ratios", i as u64);
    let n = 4 + i % 9;
    let rank = rng.random_range(1..=n);
    gaussian_psd(n, rank, &mut rng)
}

/// Column truncation `≥ OPT/√k`, eigenvector truncation `≥ (k/n)λ₁ ≥ (k/n)OPT`,
/// best of both `≥ OPT/n^{1/3}`, over every `k`.
pub fn alg_ratios(trials: usize, seed: u64, budget: &Budget) -> Result<CheckReport> {
    let mut t1 = Tally::new("alg1 >= OPT/sqrt(k)");
    let mut t2 = Tally::new("alg2 >= (k/n) OPT");
    let mut t2l = Tally::new("alg2 >= (k/n) lambda1");
    let mut tc = Tally::new("max(V1,V2) >= OPT/n^(1/3)");
    let mut tid = Tally::new("max(V1,V2) >= V1^(2/3) V2^(1/3)");
    let mut tex = Tally::new("OPT >= max(V1,V2)");
    let mut tv = Tally::new("solutions unit, k-sparse, value recomputable");
    for i in 0..trials {
        let a = ratio_instance(seed, i);
        let n = a.n();
        for k in 1..=n {
            let opt = solve_exact(&a, k, budget)?;
            let h1 = algorithm1(&a, k)?;
            let h2 = algorithm2(&a, k)?;
            let (v1, v2) = (h1.solution.value, h2.solution.value);
            let kf = k as f64;
            t1.at_least(v1, opt.value / kf.sqrt());
            t2.at_least(v2, kf / n as f64 * opt.value);
            t2l.at_least(v2, kf / n as f64 * h2.lambda1);
            tc.at_least(v1.max(v2), opt.value / (n as f64).cbrt());
            tid.at_least(v1.max(v2), v1.max(0.0).powf(2.0 / 3.0) * v2.max(0.0).powf(1.0 / 3.0));
            tex.at_least(opt.value, v1.max(v2));
            tv.flag(solution_valid(&opt, &a, k) && solution_valid(&h1.solution, &a, k) && solution_valid(&h2.solution, &a, k));
        }
    }
    Ok(report("alg-ratios", vec![t1, t2, t2l, tc, tid, tex, tv]))
}

/// Best count over the auxiliary variable for each assignment of `(x, y, z)`.
pub fn gadget() -> CheckReport {
    let mut ts = Tally::new("satisfied clause: max over h = 7 of 10");
    let mut tu = Tally::new("unsatisfied clause: max over h = 6 of 10");
    for row in gadget_table() {
        if row.clause_satisfied {
            ts.record(7.0 - row.best as f64, row.best == 7);
        } else {
            tu.record(6.0 - row.best as f64, row.best == 6);
        }
    }
    report("gadget", vec![ts, tu])
}

/// Shape of the `i`-th random formula: `n ∈ [4, max_vars]`, `d ≤ min(4, n − 1)`, `n·d` even.
fn sat_instance(seed: u64, i: usize, max_vars: usize) -> Result<Cnf> {
    let mut rng = substream(seed, "sat-sandwich", i as u64);
    loop {
        let n = rng.random_range(4..=max_vars);
        let d = rng.random_range(1..=4.min(n - 1));
        if n * d % 2 == 0 {
            return random_e2sat(n, d, &mut rng);
        }
    }
}

/// Formulas for the sandwich suite: the given one, or `trials` random ones.
pub fn sat_formulas(opts: &CheckOptions) -> Result<Vec<Cnf>> {
    match &opts.cnf {
        Some(f) => Ok(vec![f.clone()]),
        None => (0..opts.trials.unwrap_or(20)).map(|i| sat_instance(opts.seed, i, 8)).collect(),
    }
}

/// The matrix-chain checks on E2SAT-`d` formulas.
pub fn sat_sandwich(opts: &CheckOptions) -> Result<CheckReport> {
    let (c, s) = (opts.c, opts.s);
    let mut tpsd = Tally::new("A2 is PSD").with_detail("margin is the smallest eigenvalue of A2");
    let mut tdd = Tally::new("A2 diagonally dominant").with_detail("margin is 3d minus the largest off-diagonal row mass");
    let mut ta0 = Tally::new("A0 boolean, symmetric, zero diagonal, row sums <= 3d");
    let mut t10 = Tally::new("value(A1) = value(A0) on legal assignments");
    let mut t21 = Tally::new("value(A2) = value(A1) + 3d");
    let mut t32 = Tally::new("value(A3) = value(A2) + alpha");
    let mut tcons = Tally::new("pattern maximum of A1 attained by a legal assignment");
    let mut tlow = Tally::new("OPT(A3, n) >= max legal(A3)");
    let mut thigh = Tally::new("OPT(A3, n) <= max legal(A3) + (c-s)/2");
    let mut tform = Tally::new("x'A3x = (alpha/n)(1'x)^2 + 3d + x'A1x");
    let mut tyes = Tally::new("yes: legal(A0) >= c implies OPT(A3) >= alpha+3d+c");
    let mut tno = Tally::new("no: legal(A0) <= s implies OPT(A3) <= alpha+3d+(c+s)/2");
    let mut tshift = Tally::new("shifted optimum = OPT(A0) - (c+s)/2 and sign rule");

    for (idx, psi) in sat_formulas(opts)?.iter().enumerate() {
        let ch = build_reduction(psi, c, s)?;
        let n = ch.num_vars;
        let df = ch.d as f64;
        let dim = 2 * n;

        let psd = is_psd_default(&ch.a2)?;
        tpsd.record(psd.min_eigenvalue, psd.is_psd);
        let worst_off = (0..dim)
            .map(|i| (0..dim).filter(|&j| j != i).map(|j| ch.a2.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        tdd.record(3.0 * df - worst_off, 3.0 * df >= worst_off);

        let boolean = ch.a0.as_slice().iter().all(|&v| v == 0.0 || v == 1.0);
        let zero_diag = (0..dim).all(|i| ch.a0.get(i, i) == 0.0);
        let max_row = ch.a0.row_sums().into_iter().fold(0.0, f64::max);
        ta0.record(3.0 * df - max_row, boolean && zero_diag && max_row <= 3.0 * df);

        for bits in 0..(1u64 << n) {
            let assignment: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            let y = legal_vector(&assignment);
            let v: Vec<f64> = Stage::ALL
                .iter()
                .map(|&st| quad_form(ch.matrix(st), &y))
                .collect::<Result<_>>()?;
            t10.close(v[1], v[0], 1e-9);
            t21.close(v[2], v[1] + 3.0 * df, 1e-9);
            t32.close(v[3], v[2] + ch.alpha, 1e-9 * (1.0 + ch.alpha));
        }

        let legal1 = max_legal_value(&ch, Stage::A1)?;
        let pattern = max_pattern_value(&ch.a1, n, opts.budget.exact_ops)?;
        tcons.close(pattern.value, legal1.value, 1e-9);

        let legal3 = max_legal_value(&ch, Stage::A3)?;
        let opt3 = solve_exact(&ch.a3, n, &opts.budget)?;
        let scale = 1e-9 * (1.0 + legal3.value.abs());
        tlow.record(opt3.value - legal3.value, opt3.value >= legal3.value - scale);
        let hi = legal3.value + (c - s) / 2.0;
        thigh.record(hi - opt3.value, opt3.value <= hi + scale);

        let mut rng = substream(opts.seed, "sat-form", idx as u64);
        for _ in 0..10 {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nrm = norm2(&x);
            let x: Vec<f64> = x.iter().map(|v| v / nrm).collect();
            let sum: f64 = x.iter().sum();
            let lhs = quad_form(&ch.a3, &x)?;
            let rhs = ch.alpha / n as f64 * sum * sum + 3.0 * df + quad_form(&ch.a1, &x)?;
            tform.close(lhs, rhs, 1e-9 * (1.0 + lhs.abs()));
        }

        let legal0 = max_legal_value(&ch, Stage::A0)?;
        let base = ch.alpha + 3.0 * df;
        if legal0.value >= c {
            tyes.at_least(opt3.value, base + c);
        }
        if legal0.value <= s {
            tno.at_most(opt3.value, base + (c + s) / 2.0);
        }

        let val = solve_exact(&ch.a0, n, &opts.budget)?.value;
        let shifted = solve_exact(&shift_non_psd(&ch.a0, c, s), n, &opts.budget)?.value;
        let gap = (shifted - (val - (c + s) / 2.0)).abs();
        let sign_ok = ((shifted >= (c - s) / 2.0 - 1e-12) == (val >= c - 1e-12))
            && ((shifted <= (s - c) / 2.0 + 1e-12) == (val <= s + 1e-12));
        tshift.record(1e-9 - gap, gap <= 1e-9 && sign_ok);
    }
    if tyes.cases == 0 {
        tyes = tyes.with_detail("no formula had legal(A0) >= c");
    }
    if tno.cases == 0 {
        tno = tno.with_detail("no formula had legal(A0) <= s");
    }
    Ok(report(
        "sat-sandwich",
        vec![tpsd, tdd, ta0, t10, t21, t32, tcons, tlow, thigh, tform, tyes, tno, tshift],
    ))
}

/// Graph `i` of the expansion suites: `n ∈ [4, 14]`, edge density in `[0.2, 0.9]`.
pub fn expansion_instance(seed: u64, i: usize) -> Result<WalkGraph> {
    let mut rng = substream(seed, "expansion-graphs", i as u64);
    let n = 4 + i % 11;
    let p = rng.random_range(0.2..0.9);
    random_walk_graph(n, p, &mut rng)
}

fn graphs(opts: &CheckOptions, default_trials: usize) -> Result<Vec<WalkGraph>> {
    match &opts.graph {
        Some(g) => Ok(vec![g.clone()]),
        None => (0..opts.trials.unwrap_or(default_trials))
            .map(|i| expansion_instance(opts.seed, i))
            .collect(),
    }
}

fn random_subset(n: usize, rng: &mut crate::rng::Rng) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

const T_VALUES: [u32; 4] = [1, 2, 4, 8];

/// Lazy-powering lower bound on the profile, the per-set upper bound
/// `Φ_{G_lazy^t}(S) ≤ tΦ_G(S)/2`, and closure of the powers.
pub fn power_expand(opts: &CheckOptions) -> Result<CheckReport> {
    let etas = opts.eta.map_or(vec![0.1, 0.5], |e| vec![e]);
    let deltas = opts.delta.map_or(vec![0.25, 0.5], |d| vec![d]);
    let mut tl = Tally::new("Phi_lazy^t(delta) >= min(1-(1-Phi_G(4delta/eta)^2/32)^t, 1-eta)");
    let mut tn = Tally::new("power-expand with 4delta/eta < 1 (delta = 1/n, eta = 1/2)");
    let mut tu = Tally::new("Phi_lazy^t(S) <= t Phi_G(S)/2 on random subsets");
    let mut tcl = Tally::new("lazy powers symmetric, doubly stochastic, PSD");
    let mut clamped = 0usize;
    for (gi, g) in graphs(opts, 50)?.iter().enumerate() {
        let n = g.n();
        let mut rng = substream(opts.seed, "power-expand-subsets", gi as u64);
        for &t in &T_VALUES {
            let p = lazy_power(g, t)?;
            let rows_ok = p.matrix().row_sums().iter().all(|s| (s - 1.0).abs() <= 1e-9);
            let psd = is_psd_default(p.matrix())?;
            tcl.record(psd.min_eigenvalue, rows_ok && psd.is_psd);
            for &eta in &etas {
                for &delta in &deltas {
                    if (delta * n as f64 + 1e-9).floor() < 1.0 {
                        continue;
                    }
                    let r = check_power_expand(g, t, eta, delta)?;
                    clamped += usize::from(r.clamped);
                    tl.record(r.lhs - r.rhs, r.holds);
                }
            }
            if n >= 9 {
                let r = check_power_expand(g, t, 0.5, 1.0 / n as f64)?;
                tn.record(r.lhs - r.rhs, r.holds);
            }
            for _ in 0..20 {
                let s = random_subset(n, &mut rng);
                let lhs = expansion(&p, &s)?;
                let rhs = t as f64 * expansion(g, &s)? / 2.0;
                tu.record(rhs - lhs, lhs <= rhs + CHECK_TOL);
            }
        }
    }
    let tl = tl.with_detail(format!("{clamped} cases had 4delta/eta clamped to 1"));
    Ok(report("power-expand", vec![tl, tn, tu, tcl]))
}

/// `Φ_G(δ) ≤ √((2 − λ_δ)λ_δ)`, the indicator identity and profile
/// monotonicity.
pub fn cheeger(opts: &CheckOptions) -> Result<CheckReport> {
    let deltas = opts.delta.map_or(vec![0.25, 0.5], |d| vec![d]);
    let mut tc = Tally::new("Phi_G(delta) <= sqrt((2-lambda_delta) lambda_delta)");
    let mut ti = Tally::new("1_S'G1_S/|S| = 1 - Phi_G(S)");
    let mut tm = Tally::new("Phi_G(delta) nonincreasing in delta");
    for (gi, g) in graphs(opts, 50)?.iter().enumerate() {
        let n = g.n();
        for &delta in &deltas {
            if (delta * n as f64 + 1e-9).floor() < 1.0 {
                continue;
            }
            let r = check_local_cheeger(g, delta)?;
            tc.record(r.bound - r.phi, r.holds);
        }
        let mut rng = substream(opts.seed, "cheeger-subsets", gi as u64);
        for _ in 0..20 {
            let s = random_subset(n, &mut rng);
            ti.close(indicator_value(g, &s)?, 1.0 - expansion(g, &s)?, 1e-12);
        }
        let mut last = f64::INFINITY;
        for k in 1..=n {
            let p = expansion_profile(g, k as f64 / n as f64)?.phi;
            tm.record(last - p, p <= last + 1e-15);
            last = p;
        }
    }
    Ok(report("cheeger", vec![tc, ti, tm]))
}

/// Sparse PCA value of reduced walks against the SSE promise.
pub fn sse_spca(opts: &CheckOptions) -> Result<CheckReport> {
    let eta = opts.eta.unwrap_or(0.3);
    let deltas = opts.delta.map_or(vec![0.25, 0.5], |d| vec![d]);
    let mut tpsd = Tally::new("reduced walk is PSD");
    let mut tt = Tally::new("t = ceil(128 ln(1/eta))");
    let mut tf = Tally::new("val >= 1 - Phi(delta) (indicator is feasible)");
    let mut tcons = Tally::new("promise side implies value side");
    let mut tprop = Tally::new("Phi_G(S) <= eta' implies Phi_G_lazy^t(S) <= eta");
    let mut sides = [0usize; 3];
    for g in graphs(opts, 20)? {
        let red = psd_sse_reduce(&g, eta)?;
        let psd = is_psd_default(red.graph.matrix())?;
        tpsd.record(psd.min_eigenvalue, psd.is_psd);
        tt.flag(red.t == (128.0 * (1.0 / eta).ln()).ceil() as u32);
        let n = g.n();
        for &delta in &deltas {
            if (delta * n as f64 + 1e-9).floor() < 1.0 {
                continue;
            }
            for graph in [&g, &red.graph] {
                if !is_psd_default(graph.matrix())?.is_psd {
                    continue;
                }
                let r = sse_spca_values(graph, delta, eta, &opts.budget)?;
                tf.record(r.val - (1.0 - r.profile), r.feasible_point_bound);
                tcons.flag(r.consistent);
                sides[match r.promise {
                    Side::Yes => 0,
                    Side::No => 1,
                    Side::Neither => 2,
                }] += 1;
            }
        }
        for mask in 1u64..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if expansion(&g, &s)? <= red.eta_prime {
                tprop.at_most(expansion(&red.graph, &s)?, eta);
            }
        }
    }
    let tcons = tcons.with_detail(format!("promises yes/no/neither = {}/{}/{}", sides[0], sides[1], sides[2]));
    Ok(report("sse-spca", vec![tpsd, tt, tf, tcons, tprop]))
}

/// Feasibility and value of the embedding solution, character eigenvectors,
/// and the rank-1 bound against the sparse optimum when enumeration fits.
pub fn shortcode_gap(m: usize, d: usize, eps2: f64, budget: &Budget) -> Result<CheckReport> {
    let params = ShortCodeParams::new(m, d, eps2)?;
    let inst = build_instance_with(params, crate::shortcode::DEFAULT_MAX_CODEWORDS)?;
    let n = inst.n();
    let inv_e = (-1.0f64).exp();

    let mut tpsd = Tally::new("A PSD (min eigenvalue >= -1e-9)");
    let min_eig = if n <= crate::shortcode::DENSE_EXPM_MAX_N {
        inst.a.spectrum()?.min_eigenvalue()
    } else {
        inst.a_eigenvalues().last().copied().unwrap_or(0.0)
    };
    tpsd.record(min_eig + 1e-9, min_eig >= -1e-9);

    let mut trow = Tally::new("walk row sums = 1");
    for s in inst.walk.row_sums() {
        trow.close(s, 1.0, 1e-12);
    }

    let mut tcay = Tally::new("G_{f,g} depends only on f xor g");
    let mut rng = substream(0, "cayley-pairs", (m * 64 + d) as u64);
    for _ in 0..1000 {
        let (f, g) = (rng.random_range(0..n), rng.random_range(0..n));
        let h = rng.random_range(0..n);
        tcay.flag(inst.walk.get(f, g) == inst.walk.get(f ^ h, g ^ h));
    }

    let ch = inst.character_residuals();
    let mut tg = Tally::new("G phi_x = (1 - 2^(1-d)) phi_x");
    tg.record(1e-10 - ch.walk_residual, ch.walk_residual <= 1e-10);
    let mut ta = Tally::new("A phi_x = (1/e) phi_x");
    ta.record(1e-9 - ch.a_residual, ch.a_residual <= 1e-9 && (ch.a_eigenvalue - inv_e).abs() <= 1e-12);

    let sol = build_sdp_solution(&inst);
    let summary = sol.summary(&inst);
    let feas = sdp_feasibility(&inst, &sol)?;
    let mut tnorm = Tally::new("E_f <w_f, w_f> = 1");
    tnorm.close(summary.mean_norm, 1.0, 1e-12);
    let mut tsp = Tally::new("E_{f,g} |<w_f, w_g>| <= 2^(-m/2)");
    tsp.at_most(summary.mean_abs_inner, params.delta);
    let mut ttr = Tally::new("tr(X) = 1");
    ttr.close(feas.trace, 1.0, 1e-9);
    let mut tl1 = Tally::new("1'|X|1 <= k");
    tl1.record(feas.k + 1e-6 - feas.l1_mass, feas.l1_ok);
    let mut tx = Tally::new("X PSD");
    tx.record(feas.min_eigenvalue + 1e-9, feas.psd_ok);
    let mut tval = Tally::new("tr(AX) = 1/e");
    tval.close(feas.trace_ax, inv_e, 1e-6);
    let mut tid = Tally::new("tr(AX) = E_f <w_f, (Aw)_f>");
    tid.close(feas.trace_ax, feas.expectation, 1e-9);

    let bound = soundness_bound(&params);
    let k = params.k_sparse;
    let mut tsound = Tally::new("k-sparse optimum of A <= eta + 3^ell sqrt(k/n)");
    let needed = binomial(n, k) * (k as f64).powi(3);
    if needed <= budget.exact_ops && k >= 1 {
        let opt = solve_exact(&inst.a, k, budget)?;
        tsound.at_most(opt.value, bound);
        tsound = tsound.with_detail(format!("OPT = {:.9}, bound = {:.9}", opt.value, bound));
    } else {
        tsound = tsound.with_detail(format!(
            "skipped: C({n},{k})·k³ = {needed:e} exceeds the budget {:e}",
            budget.exact_ops
        ));
        tsound.skipped = true;
    }

    Ok(report(
        "shortcode-gap",
        vec![tpsd, trow, tcay, tg, ta, tnorm, tsp, ttr, tl1, tx, tval, tid, tsound],
    ))
}

/// Instance `i` of the PTAS suite: PSD with entries in `[−1, 1]`, `n ∈ [4, 12]`,
/// and its sparsity.
pub fn ptas_instance(seed: u64, i: usize) -> (SymMatrix, usize) {
    let mut rng = substream(seed, "ptas-additive", i as u64);
    let n = 4 + i % 9;
    let a = random_psd_unit_entries(n, &mut rng);
    let k = rng.random_range(1..=n);
    (a, k)
}

/// `value ≥ OPT − εk` in at least 90% of seeds, and in every seed whose
/// sketch succeeded.
pub fn ptas_additive(trials: usize, seed: u64, eps: f64, budget: &Budget) -> Result<CheckReport> {
    let mut thit = Tally::new("value >= OPT - eps k in >= 90% of seeds");
    let mut tsk = Tally::new("value >= OPT - eps k where sketch deviation <= eps/3");
    let mut tdev = Tally::new("sketch deviation <= eps/3");
    let mut tv = Tally::new("solution unit, k-sparse, value on original A");
    let mut hits = 0usize;
    for i in 0..trials {
        let (a, k) = ptas_instance(seed, i);
        let opt = solve_exact(&a, k, budget)?;
        let target = opt.value - eps * k as f64;
        match solve_additive_ptas(&a, k, eps, seed.wrapping_add(i as u64), budget) {
            Ok(out) => {
                let ok = meets(out.solution.value, target);
                hits += usize::from(ok);
                tdev.at_most(out.sketch_deviation, eps / 3.0);
                tsk.record(out.solution.value - target, ok);
                tv.flag(solution_valid(&out.solution, &a, k));
            }
            Err(Error::SketchFailed { achieved, .. }) => {
                tdev.at_most(achieved, eps / 3.0);
            }
            Err(e) => return Err(e),
        }
    }
    let frac = if trials == 0 { 1.0 } else { hits as f64 / trials as f64 };
    thit.record(frac - 0.9, frac >= 0.9);
    let thit = thit.with_detail(format!("{hits} of {trials} seeds"));
    Ok(report("ptas-additive", vec![thit, tsk, tdev, tv]))
}

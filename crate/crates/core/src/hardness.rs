//! CNF formulas, the 3SAT→2SAT gadget and the literal-matrix reduction.
//!
//! Literals are numbered `2·var + negated`, so row `2i` of every reduction
//! matrix is `xᵢ` and row `2i + 1` is `¬xᵢ`. The legal vector of an
//! assignment puts `1/√n` (with `n` the variable count) on each true literal.
//!
//! The chain is
//!
//! ```text
//! A1 = A0 + C
//! A2 = 3d·I + A1
//! A3 = (α/n)·J + A2,   α = 144d²/(c − s)
//! ```
//!
//! where `A0` is the 0/1 clause-satisfaction matrix and `C` puts `−2d` on
//! every (literal, negation) pair.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::linalg::{quad_form, SymMatrix};
use crate::rng::Rng;

/// `var` or `¬var`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    pub fn negate(self) -> Self {
        Self {
            negated: !self.negated,
            ..self
        }
    }

    /// Row of this literal in the reduction matrices.
    pub fn index(self) -> usize {
        2 * self.var + usize::from(self.negated)
    }

    pub fn from_index(index: usize) -> Self {
        Self {
            var: index / 2,
            negated: index % 2 == 1,
        }
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }

    /// DIMACS form: `var + 1`, signed.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A CNF formula with clauses of width 1 to 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            if clause.is_empty() || clause.len() > 3 {
                return Err(Error::InvalidArgument(format!(
                    "clause {c} has width {}; widths 1 to 3 are supported",
                    clause.len()
                )));
            }
            if let Some(l) = clause.iter().find(|l| l.var >= num_vars) {
                return Err(Error::InvalidArgument(format!(
                    "clause {c} references variable {} but the formula has {num_vars}",
                    l.var
                )));
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Common clause width, if all clauses agree.
    pub fn width(&self) -> Option<usize> {
        let w = self.clauses.first()?.len();
        self.clauses.iter().all(|c| c.len() == w).then_some(w)
    }

    /// Occurrences of each variable, counted once per clause.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vars];
        for clause in &self.clauses {
            let vars: BTreeSet<usize> = clause.iter().map(|l| l.var).collect();
            for v in vars {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Number of clauses satisfied by `assignment`.
    pub fn count_satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.eval(assignment)))
            .count()
    }

    /// Checks the E2SAT-`d` shape: width-2 clauses over two distinct
    /// variables, no repeated clause, every variable in exactly `d` clauses.
    pub fn check_e2sat(&self, d: usize) -> Result<()> {
        self.check_two_cnf()?;
        let offending: Vec<usize> = self
            .degrees()
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != d)
            .map(|(v, _)| v)
            .collect();
        if !offending.is_empty() {
            return Err(Error::DegreeViolation { d, offending });
        }
        Ok(())
    }

    pub fn is_e2sat(&self, d: usize) -> bool {
        self.check_e2sat(d).is_ok()
    }

    /// The `d` for which the formula is E2SAT-`d`, if any.
    pub fn e2sat_degree(&self) -> Option<usize> {
        let d = *self.degrees().first()?;
        self.is_e2sat(d).then_some(d)
    }

    fn check_two_cnf(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (c, clause) in self.clauses.iter().enumerate() {
            if clause.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "clause {c} has width {}, expected 2",
                    clause.len()
                )));
            }
            if clause[0].var == clause[1].var {
                return Err(Error::InvalidArgument(format!(
                    "clause {c} uses variable {} twice",
                    clause[0].var
                )));
            }
            let key = (clause[0].min(clause[1]), clause[0].max(clause[1]));
            if !seen.insert(key) {
                return Err(Error::InvalidArgument(format!("clause {c} repeats an earlier clause")));
            }
        }
        Ok(())
    }
}

/// Output of [`gadget_3sat_to_2sat`].
#[derive(Debug, Clone, Serialize)]
pub struct Gadget {
    /// Original variables keep their indices; auxiliaries follow.
    pub cnf: Cnf,
    /// `aux[c]` is the fresh variable of 3-clause `c`.
    pub aux: Vec<usize>,
}

/// Replaces each clause `(x ∨ y ∨ z)` by
///
/// ```text
/// (x) (y) (z) (h) (¬x ∨ ¬y) (¬x ∨ ¬z) (¬y ∨ ¬z) (x ∨ ¬h) (y ∨ ¬h) (z ∨ ¬h)
/// ```
///
/// with a fresh `h` per clause. Literals `x, y, z` may themselves be negated.
pub fn gadget_3sat_to_2sat(formula: &Cnf) -> Result<Gadget> {
    if formula.clauses.iter().any(|c| c.len() != 3) {
        return Err(Error::InvalidArgument("the gadget needs a width-3 formula".into()));
    }
    let mut clauses = Vec::with_capacity(10 * formula.clauses.len());
    let mut aux = Vec::with_capacity(formula.clauses.len());
    for (c, clause) in formula.clauses.iter().enumerate() {
        let (x, y, z) = (clause[0], clause[1], clause[2]);
        let h = Literal::pos(formula.num_vars + c);
        aux.push(h.var);
        clauses.extend([
            vec![x],
            vec![y],
            vec![z],
            vec![h],
            vec![x.negate(), y.negate()],
            vec![x.negate(), z.negate()],
            vec![y.negate(), z.negate()],
            vec![x, h.negate()],
            vec![y, h.negate()],
            vec![z, h.negate()],
        ]);
    }
    let cnf = Cnf::new(formula.num_vars + formula.clauses.len(), clauses)?;
    Ok(Gadget { cnf, aux })
}

/// One row of the gadget truth table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GadgetRow {
    pub x: bool,
    pub y: bool,
    pub z: bool,
    pub clause_satisfied: bool,
    /// Best count over the auxiliary variable.
    pub best: usize,
    pub best_h: bool,
}

/// Gadget of the single clause `(x ∨ y ∨ z)`, checked on all 8 assignments.
pub fn gadget_table() -> Vec<GadgetRow> {
    let three = Cnf::new(3, vec![vec![Literal::pos(0), Literal::pos(1), Literal::pos(2)]]).expect("valid clause");
    let g = gadget_3sat_to_2sat(&three).expect("width 3");
    (0..8u8)
        .map(|bits| {
            let (x, y, z) = (bits & 1 != 0, bits & 2 != 0, bits & 4 != 0);
            let (best, best_h) = [false, true]
                .into_iter()
                .map(|h| (g.cnf.count_satisfied(&[x, y, z, h]), h))
                .fold((0, false), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
            GadgetRow {
                x,
                y,
                z,
                clause_satisfied: x || y || z,
                best,
                best_h,
            }
        })
        .collect()
}

/// Reduction stages `A0` to `A3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Stage {
    A0,
    A1,
    A2,
    A3,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::A0, Stage::A1, Stage::A2, Stage::A3];

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("stage must be 0..=3, got {i}")))
    }
}

/// The matrices of the reduction for one E2SAT-`d` formula.
#[derive(Debug, Clone)]
pub struct ReductionChain {
    pub num_vars: usize,
    pub d: usize,
    pub c: f64,
    pub s: f64,
    pub alpha: f64,
    pub a0: SymMatrix,
    pub cmat: SymMatrix,
    pub a1: SymMatrix,
    pub a2: SymMatrix,
    pub a3: SymMatrix,
}

/// Scalar parameters of a chain, for metadata files.
#[derive(Debug, Clone, Serialize)]
pub struct ChainParams {
    pub num_vars: usize,
    pub dimension: usize,
    pub num_clauses: usize,
    pub d: usize,
    pub c: f64,
    pub s: f64,
    pub alpha: f64,
    pub identity_shift: f64,
    pub consistency_penalty: f64,
}

impl ReductionChain {
    pub fn matrix(&self, stage: Stage) -> &SymMatrix {
        match stage {
            Stage::A0 => &self.a0,
            Stage::A1 => &self.a1,
            Stage::A2 => &self.a2,
            Stage::A3 => &self.a3,
        }
    }

    /// Row pair `(xᵢ, ¬xᵢ)` of variable `i`.
    pub fn literal_rows(&self, var: usize) -> (usize, usize) {
        (Literal::pos(var).index(), Literal::neg(var).index())
    }

    pub fn params(&self, num_clauses: usize) -> ChainParams {
        ChainParams {
            num_vars: self.num_vars,
            dimension: 2 * self.num_vars,
            num_clauses,
            d: self.d,
            c: self.c,
            s: self.s,
            alpha: self.alpha,
            identity_shift: 3.0 * self.d as f64,
            consistency_penalty: -2.0 * self.d as f64,
        }
    }
}

/// `144d²/(c − s)`.
pub fn alpha(d: usize, c: f64, s: f64) -> f64 {
    144.0 * (d * d) as f64 / (c - s)
}

/// The literal-pair matrix `A0`: for each clause `(ℓ₁ ∨ ℓ₂)`, the three pairs
/// `(a, b)` with `a ∈ {ℓ₁, ¬ℓ₁}`, `b ∈ {ℓ₂, ¬ℓ₂}` that satisfy it are set to 1.
pub fn clause_matrix(psi: &Cnf) -> Result<SymMatrix> {
    let dim = 2 * psi.num_vars;
    if dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut a = SymMatrix::zeros(dim);
    for clause in &psi.clauses {
        let [l1, l2] = clause[..] else {
            return Err(Error::InvalidArgument("clause_matrix needs a 2-CNF".into()));
        };
        for a_lit in [l1, l1.negate()] {
            for b_lit in [l2, l2.negate()] {
                if a_lit == l1 || b_lit == l2 {
                    a.set(a_lit.index(), b_lit.index(), 1.0);
                    a.set(b_lit.index(), a_lit.index(), 1.0);
                }
            }
        }
    }
    Ok(a)
}

/// Builds `A0 … A3` for an E2SAT-`d` formula.
pub fn build_reduction(psi: &Cnf, c: f64, s: f64) -> Result<ReductionChain> {
    if !(0.0 < s && s < c) {
        return Err(Error::InvalidArgument(format!("need 0 < s < c, got c = {c}, s = {s}")));
    }
    if psi.num_vars == 0 {
        return Err(Error::EmptyMatrix);
    }
    psi.check_two_cnf()?;
    let deg = psi.degrees();
    let d = deg[0];
    psi.check_e2sat(d)?;
    if d == 0 {
        return Err(Error::InvalidArgument("formula has no clauses".into()));
    }

    let n = psi.num_vars;
    let df = d as f64;
    let a0 = clause_matrix(psi)?;
    let mut cmat = SymMatrix::zeros(2 * n);
    for v in 0..n {
        let (p, q) = (Literal::pos(v).index(), Literal::neg(v).index());
        cmat.set(p, q, -2.0 * df);
        cmat.set(q, p, -2.0 * df);
    }
    let a1 = a0.add(&cmat)?;
    let a2 = a1.shifted(3.0 * df);
    let alpha = alpha(d, c, s);
    let a3 = a2.map_entries(|x| x + alpha / n as f64);
    Ok(ReductionChain {
        num_vars: n,
        d,
        c,
        s,
        alpha,
        a0,
        cmat,
        a1,
        a2,
        a3,
    })
}

/// Legal vector of `assignment`: `1/√n` on each true literal.
pub fn legal_vector(assignment: &[bool]) -> Vec<f64> {
    let n = assignment.len();
    let w = 1.0 / (n as f64).sqrt();
    let mut y = vec![0.0; 2 * n];
    for (v, &b) in assignment.iter().enumerate() {
        y[Literal { var: v, negated: !b }.index()] = w;
    }
    y
}

/// `yᵀ A⁽ˢᵗᵃᵍᵉ⁾ y` for the legal vector of `assignment`.
pub fn legal_assignment_value(chain: &ReductionChain, stage: Stage, assignment: &[bool]) -> Result<f64> {
    if assignment.len() != chain.num_vars {
        return Err(Error::DimensionMismatch {
            expected: chain.num_vars,
            actual: assignment.len(),
        });
    }
    quad_form(chain.matrix(stage), &legal_vector(assignment))
}

/// Largest variable count accepted by [`max_legal_value`].
pub const MAX_LEGAL_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegalMax {
    pub value: f64,
    pub assignment: Vec<bool>,
}

fn assignment_of(bits: u64, n: usize) -> Vec<bool> {
    (0..n).map(|v| bits >> v & 1 == 1).collect()
}

/// Exact maximum over all `2^n` legal vectors. Assignments are scanned with
/// variable `v` as bit `v` of a counter; the first maximum wins.
pub fn max_legal_value(chain: &ReductionChain, stage: Stage) -> Result<LegalMax> {
    let n = chain.num_vars;
    if n > MAX_LEGAL_VARS {
        return Err(Error::SizeGuard(format!(
            "legal-assignment enumeration needs num_vars <= {MAX_LEGAL_VARS}, got {n}"
        )));
    }
    let a = chain.matrix(stage);
    let inv_n = 1.0 / n as f64;
    let mut rows = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_bits = 0u64;
    for bits in 0..(1u64 << n) {
        for (v, r) in rows.iter_mut().enumerate() {
            *r = 2 * v + usize::from(bits >> v & 1 == 0);
        }
        let mut sum = 0.0;
        for &i in &rows {
            let row = a.row(i);
            sum += rows.iter().map(|&j| row[j]).sum::<f64>();
        }
        let value = sum * inv_n;
        if value > best {
            best = value;
            best_bits = bits;
        }
    }
    Ok(LegalMax {
        value: best,
        assignment: assignment_of(best_bits, n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternMax {
    pub value: f64,
    /// Literal rows carrying `1/√n`.
    pub support: Vec<usize>,
    pub is_legal: bool,
}

/// Maximum of `zᵀAz` over every `z ∈ {0, 1/√n}^{2n}` with exactly `n`
/// nonzeros, legal or not.
pub fn max_pattern_value(a: &SymMatrix, num_vars: usize, max_supports: f64) -> Result<PatternMax> {
    let dim = 2 * num_vars;
    if a.n() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: a.n(),
        });
    }
    let count = binomial(dim, num_vars);
    if count > max_supports {
        return Err(Error::BudgetExceeded {
            what: format!("pattern enumeration C({dim},{num_vars})"),
            needed: count,
            budget: max_supports,
        });
    }
    let inv_n = 1.0 / num_vars as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_support = Vec::new();
    for_each_combination(dim, num_vars, |s| {
        let mut sum = 0.0;
        for &i in s {
            let row = a.row(i);
            sum += s.iter().map(|&j| row[j]).sum::<f64>();
        }
        let value = sum * inv_n;
        if value > best {
            best = value;
            best_support = s.to_vec();
        }
    });
    let vars: BTreeSet<usize> = best_support.iter().map(|&i| i / 2).collect();
    Ok(PatternMax {
        value: best,
        is_legal: vars.len() == num_vars,
        support: best_support,
    })
}

/// `A − ((c + s)/2)·I`. For unit `x` the form drops by exactly `(c + s)/2`,
/// so `val ≥ c` maps to `val′ ≥ (c − s)/2` and `val ≤ s` to `val′ ≤ (s − c)/2`.
pub fn shift_non_psd(a: &SymMatrix, c: f64, s: f64) -> SymMatrix {
    a.shifted(-(c + s) / 2.0)
}

/// Result of [`regularize_degree`].
#[derive(Debug, Clone, Serialize)]
pub struct Regularized {
    pub cnf: Cnf,
    pub d: usize,
    /// Padding variables are `original_vars..cnf.num_vars()`.
    pub original_vars: usize,
    pub padding_clauses: usize,
}

/// Pads a 2-CNF whose variables occur at most `d` times into an E2SAT-`d`
/// formula by adding fresh variables and all-positive clauses.
///
/// Missing occurrences ("stubs") are paired up. Each pair `(u₁, u₂)` gets a
/// block of `d + 1` fresh variables wired as `K_{d+1}` minus the edge
/// `(z₀, z₁)`, plus clauses `(u₁ ∨ z₀)` and `(u₂ ∨ z₁)`. An odd leftover stub
/// `u` (only possible for odd `d`) gets a block on `d + 2` fresh variables:
/// `K_{d+2}` minus a perfect matching on `z₁ … z_{d+1}` and minus `(z₀, z₁)`,
/// plus `(u ∨ z₁)`. Every padding clause is positive, so an all-true
/// assignment of the padding satisfies all of them.
pub fn regularize_degree(psi: &Cnf, d: usize) -> Result<Regularized> {
    psi.check_two_cnf()?;
    if d == 0 {
        return Err(Error::InvalidArgument("target degree must be >= 1".into()));
    }
    let deg = psi.degrees();
    let over: Vec<usize> = deg.iter().enumerate().filter(|(_, &k)| k > d).map(|(v, _)| v).collect();
    if !over.is_empty() {
        return Err(Error::DegreeViolation { d, offending: over });
    }
    let mut stubs = Vec::new();
    for (v, &k) in deg.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v, d - k));
    }

    let mut num_vars = psi.num_vars;
    let mut clauses = psi.clauses.clone();
    let mut fresh = |count: usize| {
        let start = num_vars;
        num_vars += count;
        (start..start + count).collect::<Vec<usize>>()
    };
    let edge = |a: usize, b: usize| vec![Literal::pos(a), Literal::pos(b)];

    let mut pairs = stubs.chunks_exact(2);
    for pair in pairs.by_ref() {
        let z = fresh(d + 1);
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                if (i, j) != (0, 1) {
                    clauses.push(edge(z[i], z[j]));
                }
            }
        }
        clauses.push(edge(pair[0], z[0]));
        clauses.push(edge(pair[1], z[1]));
    }
    if let [u] = pairs.remainder() {
        let z = fresh(d + 2);
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                // matching pairs (z1,z2), (z3,z4), … and the edge (z0,z1)
                let matched = i >= 1 && i % 2 == 1 && j == i + 1;
                if !matched && (i, j) != (0, 1) {
                    clauses.push(edge(z[i], z[j]));
                }
            }
        }
        clauses.push(edge(*u, z[1]));
    }
    let padding_clauses = clauses.len() - psi.clauses.len();
    let cnf = Cnf::new(num_vars, clauses)?;
    cnf.check_e2sat(d)?;
    Ok(Regularized {
        cnf,
        d,
        original_vars: psi.num_vars,
        padding_clauses,
    })
}

/// Random E2SAT-`d` formula from the configuration model with random signs.
///
/// Pairings that put a variable twice in one clause or repeat a variable pair
/// are rejected and redrawn.
pub fn random_e2sat(num_vars: usize, d: usize, rng: &mut Rng) -> Result<Cnf> {
    if d == 0 || num_vars < d + 1 || (num_vars * d) % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "no simple E2SAT-{d} formula on {num_vars} variables (need n > d and n·d even)"
        )));
    }
    const ATTEMPTS: usize = 10_000;
    let mut stubs: Vec<usize> = (0..num_vars).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..ATTEMPTS {
        stubs.shuffle(rng);
        let mut seen = BTreeSet::new();
        let mut clauses = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            clauses.push(vec![
                Literal {
                    var: u,
                    negated: rng.random(),
                },
                Literal {
                    var: v,
                    negated: rng.random(),
                },
            ]);
        }
        return Cnf::new(num_vars, clauses);
    }
    Err(Error::InvalidArgument(format!(
        "no simple E2SAT-{d} pairing on {num_vars} variables found in {ATTEMPTS} attempts"
    )))
}

/// Parsed DIMACS file.
#[derive(Debug, Clone)]
pub struct Dimacs {
    pub cnf: Cnf,
    /// From a `c e2sat d=<d>` comment, if present.
    pub declared_d: Option<usize>,
}

/// Reads DIMACS CNF. Clauses may span lines and end with `0`.
pub fn parse_dimacs(text: &str) -> Result<Dimacs> {
    let mut header: Option<(usize, usize)> = None;
    let mut declared_d = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if let Some(d) = rest.trim().strip_prefix("e2sat") {
                let value = d
                    .trim()
                    .strip_prefix("d=")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(line_no, "malformed `c e2sat d=<d>` header"))?;
                declared_d = Some(value);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match toks.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| Error::parse(line_no, "bad variable count"))?;
                    let c = c.parse().map_err(|_| Error::parse(line_no, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(Error::parse(line_no, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| Error::parse(line_no, "clause before `p cnf` header"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid literal `{tok}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::parse(line_no, "empty clause"));
                }
                if current.len() > 3 {
                    return Err(Error::parse(line_no, "clauses wider than 3 are not supported"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs() as usize - 1;
            if var >= num_vars {
                return Err(Error::parse(line_no, format!("literal {lit} exceeds {num_vars} variables")));
            }
            current.push(Literal {
                var,
                negated: lit < 0,
            });
        }
    }
    let (num_vars, num_clauses) = header.ok_or_else(|| Error::parse(last_line.max(1), "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(Error::parse(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != num_clauses {
        return Err(Error::parse(
            last_line,
            format!("header declares {num_clauses} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Dimacs {
        cnf: Cnf::new(num_vars, clauses)?,
        declared_d,
    })
}

pub fn write_dimacs(cnf: &Cnf, declared_d: Option<usize>) -> String {
    let mut out = String::new();
    if let Some(d) = declared_d {
        out.push_str(&format!("c e2sat d={d}\n"));
    }
    out.push_str(&format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len()));
    for clause in &cnf.clauses {
        for l in clause {
            out.push_str(&format!("{} ", l.to_dimacs()));
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_psd_default;
    use crate::rng::substream;

    fn single() -> Cnf {
        Cnf::new(2, vec![vec![Literal::pos(0), Literal::pos(1)]]).unwrap()
    }

    #[test]
    fn literal_indexing() {
        assert_eq!(Literal::pos(3).index(), 6);
        assert_eq!(Literal::neg(3).index(), 7);
        assert_eq!(Literal::from_index(7), Literal::neg(3));
        assert_eq!(Literal::neg(0).to_dimacs(), -1);
    }

    #[test]
    fn gadget_counts() {
        for row in gadget_table() {
            let want = if row.clause_satisfied { 7 } else { 6 };
            assert_eq!(row.best, want, "{row:?}");
        }
        let f = Cnf::new(
            4,
            vec![
                vec![Literal::pos(0), Literal::neg(1), Literal::pos(2)],
                vec![Literal::neg(0), Literal::pos(1), Literal::pos(3)],
            ],
        )
        .unwrap();
        let g = gadget_3sat_to_2sat(&f).unwrap();
        assert_eq!(g.cnf.clauses().len(), 20);
        assert_eq!(g.cnf.num_vars(), 6);
        assert_eq!(g.aux, vec![4, 5]);
        assert!(gadget_3sat_to_2sat(&single()).is_err());
    }

    #[test]
    fn negated_gadget_literals_follow_the_clause() {
        let f = Cnf::new(3, vec![vec![Literal::neg(0), Literal::neg(1), Literal::neg(2)]]).unwrap();
        let g = gadget_3sat_to_2sat(&f).unwrap();
        for bits in 0..8u8 {
            let a = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
            let best = [false, true]
                .iter()
                .map(|&h| g.cnf.count_satisfied(&[a[0], a[1], a[2], h]))
                .max()
                .unwrap();
            let sat = f.count_satisfied(&a) == 1;
            assert_eq!(best, if sat { 7 } else { 6 });
        }
    }

    #[test]
    fn single_clause_chain() {
        let ch = build_reduction(&single(), 0.9, 0.8).unwrap();
        let (x1, nx1, x2, nx2) = (0, 1, 2, 3);
        for (i, j) in [(x1, x2), (x1, nx2), (nx1, x2)] {
            assert_eq!(ch.a0.get(i, j), 1.0);
            assert_eq!(ch.a0.get(j, i), 1.0);
        }
        assert_eq!(ch.a0.get(nx1, nx2), 0.0);
        assert_eq!(ch.cmat.get(x1, nx1), -2.0);
        assert_eq!(ch.cmat.get(nx1, x1), -2.0);
        assert_eq!(ch.cmat.get(x1, x2), 0.0);
        assert!((ch.alpha - 144.0 / 0.1).abs() < 1e-9);

        let v = legal_assignment_value(&ch, Stage::A0, &[true, true]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = legal_assignment_value(&ch, Stage::A0, &[false, false]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn a2_is_not_psd_on_the_single_clause() {
        // row x₁ of A0 has two ones, |C| adds 2: off-diagonal mass 4 > 3d
        let ch = build_reduction(&single(), 0.9, 0.8).unwrap();
        let r = is_psd_default(&ch.a2).unwrap();
        assert!(!r.is_psd);
        assert!((r.min_eigenvalue - (-0.541_381_265_149_109_8)).abs() < 1e-9, "{}", r.min_eigenvalue);
    }

    #[test]
    fn stage_identities() {
        let mut rng = substream(3, "stage-identities", 0);
        let psi = random_e2sat(6, 3, &mut rng).unwrap();
        let ch = build_reduction(&psi, 0.9, 0.8).unwrap();
        for bits in 0..64u64 {
            let a = assignment_of(bits, 6);
            let v: Vec<f64> = Stage::ALL.iter().map(|&s| legal_assignment_value(&ch, s, &a).unwrap()).collect();
            assert!((v[1] - v[0]).abs() < 1e-12);
            assert!((v[2] - v[1] - 9.0).abs() < 1e-9);
            assert!((v[3] - v[2] - ch.alpha).abs() < 1e-9 * ch.alpha);
            let sat = psi.count_satisfied(&a) as f64;
            assert!((v[0] - 2.0 * sat / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn a3_quadratic_form_decomposes() {
        let mut rng = substream(4, "a3-form", 0);
        let psi = random_e2sat(5, 2, &mut rng).unwrap();
        let ch = build_reduction(&psi, 0.9, 0.8).unwrap();
        for t in 0..20 {
            let x: Vec<f64> = (0..10).map(|i| ((i * 13 + t * 7) as f64).sin()).collect();
            let nrm = crate::linalg::norm2(&x);
            let x: Vec<f64> = x.iter().map(|v| v / nrm).collect();
            let sum: f64 = x.iter().sum();
            let lhs = quad_form(&ch.a3, &x).unwrap();
            let rhs = ch.alpha / 5.0 * sum * sum + 6.0 + quad_form(&ch.a1, &x).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn consistency_claim_small() {
        for seed in 0..5 {
            let mut rng = substream(seed, "consistency", 0);
            let psi = random_e2sat(6, 2, &mut rng).unwrap();
            let ch = build_reduction(&psi, 0.9, 0.8).unwrap();
            let p = max_pattern_value(&ch.a1, 6, 1e6).unwrap();
            let l = max_legal_value(&ch, Stage::A1).unwrap();
            assert!((p.value - l.value).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_violation_lists_variables() {
        let psi = Cnf::new(
            3,
            vec![vec![Literal::pos(0), Literal::pos(1)], vec![Literal::pos(0), Literal::neg(2)]],
        )
        .unwrap();
        match build_reduction(&psi, 0.9, 0.8) {
            Err(Error::DegreeViolation { d, offending }) => {
                assert_eq!(d, 2);
                assert_eq!(offending, vec![1, 2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shift_examples() {
        let z = shift_non_psd(&SymMatrix::identity(3), 1.2, 0.8);
        assert!(z.max_abs() < 1e-15);
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]], 0.0).unwrap();
        let sh = shift_non_psd(&a, 2.5, 1.5);
        assert_eq!(sh.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let b = crate::Budget::default();
        let v2 = crate::solvers::solve_exact(&sh, 2, &b).unwrap().value;
        let v1 = crate::solvers::solve_exact(&sh, 1, &b).unwrap().value;
        assert!((v2 - 1.0).abs() < 1e-14);
        assert_eq!(v1, 0.0);
    }

    #[test]
    fn regularization_reaches_exact_degree() {
        for (d, clauses) in [
            (1, vec![]),
            (3, vec![vec![Literal::pos(0), Literal::neg(1)]]),
            (2, vec![vec![Literal::pos(0), Literal::neg(1)], vec![Literal::neg(1), Literal::pos(2)]]),
            (4, vec![vec![Literal::pos(0), Literal::pos(1)]]),
            (3, vec![]),
        ] {
            let psi = Cnf::new(3, clauses).unwrap();
            let r = regularize_degree(&psi, d).unwrap();
            assert!(r.cnf.is_e2sat(d), "d = {d}");
            assert_eq!(&r.cnf.clauses()[..psi.clauses().len()], psi.clauses());
            let padding: Vec<bool> = (0..r.cnf.num_vars()).map(|v| v >= 3).collect();
            let sat = r.cnf.count_satisfied(&padding);
            assert!(sat >= r.padding_clauses);
        }
    }

    #[test]
    fn random_formulas_are_e2sat() {
        let mut rng = substream(1, "random-e2sat", 0);
        for (n, d) in [(4, 1), (6, 3), (8, 4), (5, 2), (7, 4)] {
            let f = random_e2sat(n, d, &mut rng).unwrap();
            assert_eq!(f.e2sat_degree(), Some(d));
        }
        assert!(random_e2sat(5, 3, &mut rng).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let mut rng = substream(2, "dimacs", 0);
        let f = random_e2sat(6, 3, &mut rng).unwrap();
        let text = write_dimacs(&f, Some(3));
        let back = parse_dimacs(&text).unwrap();
        assert_eq!(back.cnf, f);
        assert_eq!(back.declared_d, Some(3));
    }

    #[test]
    fn dimacs_errors_carry_lines() {
        let e = parse_dimacs("p cnf 2 1\n1 x 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        let ok = parse_dimacs("c hi\np cnf 2 1\n1\n-2 0\n").unwrap();
        assert_eq!(ok.cnf.clauses()[0], vec![Literal::pos(0), Literal::neg(1)]);
    }
}

//! Sparse PCA solvers.
//!
//! * [`solve_exact`] enumerates every size-`k` support and takes the top
//!   eigenpair of each principal submatrix. It is the oracle for `OPT`.
//! * [`algorithm1`] truncates each column of `A` (and tries each `e_i`);
//!   on PSD input it is within `√k` of `OPT`.
//! * [`algorithm2`] truncates the top eigenvector; within `n/k` on PSD input.
//! * [`solve_approx`] keeps the better of the two, which is within `n^{1/3}`.
//! * [`solve_additive_ptas`] sketches `A` with a Gaussian projection and
//!   searches an ε-net of the sketch's row space; for PSD `A` with entries in
//!   `[−1, 1]` it reaches `OPT − εk`.
//!
//! Truncation ties (equal magnitudes) go to the lower index.

use std::cmp::Ordering;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_succeeds, eigenvalues_sym, is_psd_default, jacobi_in_place, SymMatrix};
use crate::rng::substream;
use crate::Budget;

/// A unit vector with at most `k` nonzeros, stored on its support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSolution {
    pub n: usize,
    /// Ascending indices.
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// `xᵀAx` for the matrix the solution was computed against.
    pub value: f64,
}

impl SparseSolution {
    /// Evaluates `(support, coefficients)` against `a`.
    pub fn evaluate(a: &SymMatrix, support: Vec<usize>, coefficients: Vec<f64>) -> Self {
        let value = support_quad_form(a, &support, &coefficients);
        Self {
            n: a.n(),
            support,
            coefficients,
            value,
        }
    }

    pub fn dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &c) in self.support.iter().zip(&self.coefficients) {
            x[i] = c;
        }
        x
    }

    /// Same vector, value recomputed against another matrix.
    pub fn reevaluate(&self, a: &SymMatrix) -> Self {
        Self::evaluate(a, self.support.clone(), self.coefficients.clone())
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn support_quad_form(a: &SymMatrix, support: &[usize], coef: &[f64]) -> f64 {
    let mut v = 0.0;
    for (p, &i) in support.iter().enumerate() {
        let mut row = 0.0;
        for (q, &j) in support.iter().enumerate() {
            row += a.get(i, j) * coef[q];
        }
        v += coef[p] * row;
    }
    v
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("sparsity k must satisfy 1 <= k <= n = {n}, got {k}")));
    }
    Ok(())
}

/// Orders indices by magnitude descending, then index ascending.
fn magnitude_order(v: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j))
}

/// Keeps the `k` largest-magnitude entries of `v` and normalizes them.
///
/// Returns `(support, coefficients)` with the support ascending; entries that
/// are exactly zero are left out of the support.
pub fn truncate_to_sparse(v: &[f64], k: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    check_k(v.len(), k)?;
    let mut order: Vec<usize> = (0..v.len()).collect();
    let cmp = magnitude_order(v);
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, &cmp);
    }
    let mut support: Vec<usize> = order[..k].iter().copied().filter(|&i| v[i] != 0.0).collect();
    support.sort_unstable();
    let norm = support.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let coefficients = support.iter().map(|&i| v[i] / norm).collect();
    Ok((support, coefficients))
}

/// Exact optimum by enumerating all `C(n, k)` supports.
///
/// Each candidate support is first screened with a Cholesky factorization of
/// `best·I − A_S`: if that succeeds, `λ_max(A_S) < best` and the support is
/// skipped. Otherwise its eigenvalues are computed. Ties keep the
/// lexicographically smallest support.
pub fn solve_exact(a: &SymMatrix, k: usize, budget: &Budget) -> Result<SparseSolution> {
    let n = a.n();
    check_k(n, k)?;
    let needed = binomial(n, k) * (k as f64).powi(3);
    if needed > budget.exact_ops {
        return Err(Error::BudgetExceeded {
            what: format!("solve_exact C({n},{k})·k³"),
            needed,
            budget: budget.exact_ops,
        });
    }

    let mut best = f64::NEG_INFINITY;
    let mut best_support: Vec<usize> = Vec::new();
    let mut sub = vec![0.0; k * k];
    let mut scratch = vec![0.0; k * k];
    for_each_combination(n, k, |s| {
        for (p, &i) in s.iter().enumerate() {
            let row = a.row(i);
            for (q, &j) in s.iter().enumerate() {
                sub[p * k + q] = row[j];
            }
        }
        if best.is_finite() {
            for (dst, src) in scratch.iter_mut().zip(&sub) {
                *dst = -src;
            }
            for p in 0..k {
                scratch[p * k + p] += best;
            }
            if cholesky_succeeds(&mut scratch, k) {
                return;
            }
        }
        scratch.copy_from_slice(&sub);
        let top = match jacobi_in_place(&mut scratch, k, None) {
            Ok(vals) => vals.into_iter().fold(f64::NEG_INFINITY, f64::max),
            // fall back to the slower sorted path; non-convergence is reported below
            Err(_) => f64::NAN,
        };
        if top.is_nan() || top > best {
            if top.is_nan() {
                best_support.clear();
                best_support.extend_from_slice(s);
                best = f64::NAN;
                return;
            }
            best = top;
            best_support.clear();
            best_support.extend_from_slice(s);
        }
    });
    if best.is_nan() {
        // surface the convergence failure with its residual
        eigenvalues_sym(&a.principal_submatrix(&best_support))?;
    }

    let sub = a.principal_submatrix(&best_support);
    let spec = sub.spectrum()?;
    let (_, v) = spec.top();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let coefficients: Vec<f64> = v.iter().map(|x| x / norm).collect();
    Ok(SparseSolution::evaluate(a, best_support, coefficients))
}

/// Solver output plus whether the PSD-based guarantee applies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heuristic {
    pub solution: SparseSolution,
    /// True when `A` failed the PSD test: the ratio bound is void.
    pub guarantee_void: bool,
}

fn psd_guarantee(a: &SymMatrix, who: &str) -> Result<bool> {
    let r = is_psd_default(a)?;
    if !r.is_psd {
        log::warn!(
            "{who}: input is not PSD (min eigenvalue {:.3e}); approximation guarantee void",
            r.min_eigenvalue
        );
    }
    Ok(!r.is_psd)
}

/// Best of the truncated columns `x_i` and the basis vectors `e_i`.
///
/// Candidates are scanned as `x_0, e_0, x_1, e_1, …`; the first strict
/// maximum wins.
pub fn algorithm1(a: &SymMatrix, k: usize) -> Result<Heuristic> {
    let n = a.n();
    check_k(n, k)?;
    let guarantee_void = psd_guarantee(a, "algorithm1")?;
    let mut best: Option<SparseSolution> = None;
    let mut consider = |cand: SparseSolution| {
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    };
    for i in 0..n {
        match truncate_to_sparse(a.row(i), k) {
            Ok((s, c)) => consider(SparseSolution::evaluate(a, s, c)),
            Err(Error::ZeroVector) => {}
            Err(e) => return Err(e),
        }
        consider(SparseSolution::evaluate(a, vec![i], vec![1.0]));
    }
    Ok(Heuristic {
        solution: best.expect("n >= 1 gives a candidate"),
        guarantee_void,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTruncation {
    pub solution: SparseSolution,
    pub lambda1: f64,
    pub guarantee_void: bool,
}

/// Truncation of the top eigenvector.
pub fn algorithm2(a: &SymMatrix, k: usize) -> Result<EigenTruncation> {
    check_k(a.n(), k)?;
    let guarantee_void = psd_guarantee(a, "algorithm2")?;
    let spec = a.spectrum()?;
    let (lambda1, v1) = spec.top();
    let (s, c) = truncate_to_sparse(v1, k)?;
    Ok(EigenTruncation {
        solution: SparseSolution::evaluate(a, s, c),
        lambda1,
        guarantee_void,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Combined {
    pub solution: SparseSolution,
    pub v1: f64,
    pub v2: f64,
    pub lambda1: f64,
    /// Which algorithm supplied the solution (1 or 2).
    pub chosen: u8,
    pub guarantee_void: bool,
}

impl Combined {
    /// `max(V₁, V₂) ≥ V₁^{2/3} V₂^{1/3}`, meaningful for nonnegative values.
    pub fn combination_holds(&self) -> bool {
        let (v1, v2) = (self.v1.max(0.0), self.v2.max(0.0));
        self.v1.max(self.v2) >= v1.powf(2.0 / 3.0) * v2.powf(1.0 / 3.0) * (1.0 - 1e-12)
    }
}

/// Better of [`algorithm1`] and [`algorithm2`]; ties go to algorithm 1.
pub fn solve_approx(a: &SymMatrix, k: usize) -> Result<Combined> {
    let h1 = algorithm1(a, k)?;
    let h2 = algorithm2(a, k)?;
    let (v1, v2) = (h1.solution.value, h2.solution.value);
    let (solution, chosen) = if v1 >= v2 { (h1.solution, 1) } else { (h2.solution, 2) };
    Ok(Combined {
        solution,
        v1,
        v2,
        lambda1: h2.lambda1,
        chosen,
        guarantee_void: h1.guarantee_void,
    })
}

/// Maximum number of sketch attempts in [`jl_sketch`].
pub const JL_MAX_ATTEMPTS: u32 = 10;

/// Low-rank PSD sketch `A_ε = BᵀB`.
#[derive(Debug, Clone)]
pub struct SketchMatrix {
    /// `rank × n`.
    pub factor: Vec<Vec<f64>>,
    pub n: usize,
    pub eps: f64,
    /// `max_ij |A − A_ε|`.
    pub deviation: f64,
    /// Attempts used (1-based).
    pub attempts: u32,
    approx: SymMatrix,
}

impl SketchMatrix {
    pub fn rank(&self) -> usize {
        self.factor.len()
    }

    /// `BᵀB`.
    pub fn gram(&self) -> &SymMatrix {
        &self.approx
    }

    /// Builds a sketch from an explicit factor (`rows × n`).
    pub fn from_factor(factor: Vec<Vec<f64>>) -> Result<Self> {
        let n = factor.first().map(Vec::len).ok_or(Error::EmptyMatrix)?;
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if let Some(bad) = factor.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let approx = gram_of(&factor, n);
        Ok(Self {
            factor,
            n,
            eps: f64::NAN,
            deviation: f64::NAN,
            attempts: 0,
            approx,
        })
    }
}

fn gram_of(factor: &[Vec<f64>], n: usize) -> SymMatrix {
    SymMatrix::from_fn(n, |i, j| factor.iter().map(|r| r[i] * r[j]).sum())
}

/// Sketch rank `⌈8 ln n / ε²⌉` (at least 1).
pub fn jl_rank(n: usize, eps: f64) -> usize {
    ((8.0 * (n as f64).ln() / (eps * eps)).ceil() as usize).max(1)
}

/// Gaussian sketch `B = Π A^{1/2}` with `Π` of size `d × n`, entries `N(0, 1/d)`.
///
/// Retries with fresh substreams of `seed` until the entrywise deviation is
/// at most `eps`.
pub fn jl_sketch(a: &SymMatrix, eps: f64, seed: u64) -> Result<SketchMatrix> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("sketch eps must lie in (0, 1), got {eps}")));
    }
    if a.max_abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "sketch input needs entries in [-1, 1], found |a| = {}",
            a.max_abs()
        )));
    }
    let psd = is_psd_default(a)?;
    if !psd.is_psd {
        return Err(Error::InvalidArgument(format!(
            "sketch input must be PSD (min eigenvalue {:e})",
            psd.min_eigenvalue
        )));
    }
    let n = a.n();
    let d = jl_rank(n, eps);
    let root = a.spectrum()?.map_spectrum(|l| l.max(0.0).sqrt());
    let sd = 1.0 / (d as f64).sqrt();

    let mut best_dev = f64::INFINITY;
    for attempt in 0..JL_MAX_ATTEMPTS {
        let mut rng = substream(seed, "jl-sketch", u64::from(attempt));
        let mut factor = vec![vec![0.0; n]; d];
        let mut pi_row = vec![0.0; n];
        for row in factor.iter_mut() {
            for p in pi_row.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *p = sd * z;
            }
            for (j, out) in row.iter_mut().enumerate() {
                *out = (0..n).map(|l| pi_row[l] * root.get(l, j)).sum();
            }
        }
        let approx = gram_of(&factor, n);
        let deviation = a
            .as_slice()
            .iter()
            .zip(approx.as_slice())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if deviation <= eps {
            return Ok(SketchMatrix {
                factor,
                n,
                eps,
                deviation,
                attempts: attempt + 1,
                approx,
            });
        }
        best_dev = best_dev.min(deviation);
    }
    Err(Error::SketchFailed {
        achieved: best_dev,
        eps,
        attempts: JL_MAX_ATTEMPTS,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct NetOptions {
    /// Maximum number of directions.
    pub budget: u64,
    /// Fall back to uniform random directions when the grid is too large or
    /// the rank exceeds 3.
    pub allow_sampling: bool,
    pub seed: u64,
}

impl NetOptions {
    pub fn new(budget: &Budget, seed: u64) -> Self {
        Self {
            budget: budget.net_points,
            allow_sampling: true,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NetOutcome {
    /// Evaluated against `A_d = BᵀB`.
    pub solution: SparseSolution,
    /// Dimension of the sphere that was searched.
    pub search_rank: usize,
    pub directions: u64,
    /// True when a full deterministic net was enumerated.
    pub exhaustive: bool,
}

/// Directions of a deterministic net on the unit sphere of `R^r`, `r ≤ 3`,
/// with covering radius about `arcsin(eps)/2`.
pub fn sphere_net(r: usize, eps: f64) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    let step = if eps >= 1.0 { PI / 2.0 } else { eps.asin() };
    match r {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let count = (2.0 * PI / step).ceil() as usize;
            (0..count)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / count as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        3 => {
            // polar bands of width h, azimuth arc ≤ h inside each band
            let h = step / std::f64::consts::SQRT_2;
            let bands = (PI / h).ceil() as usize;
            let width = PI / bands as f64;
            let mut pts = Vec::new();
            for b in 0..bands {
                let theta = (b as f64 + 0.5) * width;
                let widest = ((b as f64) * width).sin().max(((b + 1) as f64 * width).sin()).max(theta.sin());
                let count = ((2.0 * PI * widest / width).ceil() as usize).max(1);
                for j in 0..count {
                    let phi = 2.0 * PI * j as f64 / count as f64;
                    pts.push(vec![theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                }
            }
            pts
        }
        _ => panic!("deterministic nets only for r <= 3"),
    }
}

/// Size of [`sphere_net`] without materializing it; `None` for `r > 3`.
fn sphere_net_size(r: usize, eps: f64) -> Option<u64> {
    use std::f64::consts::PI;
    let step = if eps >= 1.0 { PI / 2.0 } else { eps.asin() };
    match r {
        1 => Some(2),
        2 => Some((2.0 * PI / step).ceil() as u64),
        3 => {
            let h = step / std::f64::consts::SQRT_2;
            let bands = (PI / h).ceil();
            Some((bands * (2.0 * bands + 1.0)) as u64)
        }
        _ => None,
    }
}

/// Row factor used for the search: `B` itself when its row count is at most
/// 3, otherwise an exact rank-revealing factor `F` with `FᵀF = BᵀB`.
fn search_factor(b: &SketchMatrix) -> Result<Vec<Vec<f64>>> {
    if b.rank() <= 3 {
        return Ok(b.factor.clone());
    }
    let spec = b.gram().spectrum()?;
    let top = spec.eigenvalues[0].max(0.0);
    Ok(spec
        .eigenvalues
        .iter()
        .zip(&spec.eigenvectors)
        .filter(|(l, _)| **l > 1e-12 * top && **l > 0.0)
        .map(|(l, v)| v.iter().map(|x| x * l.sqrt()).collect())
        .collect())
}

struct NetScanner<'a> {
    factor: &'a [Vec<f64>],
    n: usize,
    k: usize,
    scores: Vec<f64>,
    order: Vec<usize>,
    best_value: f64,
    best: Option<(Vec<usize>, Vec<f64>)>,
}

impl<'a> NetScanner<'a> {
    fn new(factor: &'a [Vec<f64>], n: usize, k: usize) -> Self {
        Self {
            factor,
            n,
            k,
            scores: vec![0.0; n],
            order: (0..n).collect(),
            best_value: f64::NEG_INFINITY,
            best: None,
        }
    }

    fn visit(&mut self, c: &[f64]) {
        for (j, s) in self.scores.iter_mut().enumerate() {
            *s = self.factor.iter().zip(c).map(|(row, ci)| row[j] * ci).sum();
        }
        for (i, o) in self.order.iter_mut().enumerate() {
            *o = i;
        }
        let scores = &self.scores;
        let cmp = magnitude_order(scores);
        if self.k < self.n {
            self.order.select_nth_unstable_by(self.k - 1, &cmp);
        }
        let top = &mut self.order[..self.k];
        top.sort_unstable();
        let norm = top.iter().map(|&i| scores[i] * scores[i]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return;
        }
        // ‖F x‖² with x the normalized truncation
        let mut value = 0.0;
        for row in self.factor {
            let p: f64 = top.iter().map(|&i| row[i] * scores[i]).sum();
            value += p * p;
        }
        value /= norm * norm;
        if value > self.best_value {
            self.best_value = value;
            let support: Vec<usize> = top.iter().copied().filter(|&i| scores[i] != 0.0).collect();
            let coef = support.iter().map(|&i| scores[i] / norm).collect();
            self.best = Some((support, coef));
        }
    }
}

/// ε-net search over directions `c` of the sketch's row space: each
/// direction's scores `Bᵀc` are truncated to the top `k` and scored on `BᵀB`.
pub fn eps_net_search(b: &SketchMatrix, k: usize, eps: f64, opts: &NetOptions) -> Result<NetOutcome> {
    let n = b.n;
    check_k(n, k)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("net eps must be > 0, got {eps}")));
    }
    let factor = search_factor(b)?;
    let r = factor.len();
    let gram = b.gram();
    if r == 0 {
        // A_d = 0: every unit vector scores 0
        return Ok(NetOutcome {
            solution: SparseSolution::evaluate(gram, vec![0], vec![1.0]),
            search_rank: 0,
            directions: 0,
            exhaustive: true,
        });
    }

    let mut scan = NetScanner::new(&factor, n, k);
    let net_size = sphere_net_size(r, eps);
    let (directions, exhaustive) = match net_size {
        Some(size) if size <= opts.budget => {
            let net = sphere_net(r, eps);
            for c in &net {
                scan.visit(c);
            }
            (net.len() as u64, true)
        }
        _ => {
            if !opts.allow_sampling {
                return Err(Error::BudgetExceeded {
                    what: format!("eps-net on the rank-{r} sphere"),
                    needed: net_size.map_or(f64::INFINITY, |s| s as f64),
                    budget: opts.budget as f64,
                });
            }
            let mut rng = substream(opts.seed, "eps-net", r as u64);
            let mut c = vec![0.0; r];
            for _ in 0..opts.budget {
                for ci in c.iter_mut() {
                    *ci = StandardNormal.sample(&mut rng);
                }
                scan.visit(&c);
            }
            (opts.budget, false)
        }
    };
    let (support, coef) = scan.best.ok_or(Error::ZeroVector)?;
    Ok(NetOutcome {
        solution: SparseSolution::evaluate(gram, support, coef),
        search_rank: r,
        directions,
        exhaustive,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PtasOutcome {
    /// Evaluated against the original matrix.
    pub solution: SparseSolution,
    /// Value of the same vector on the sketch.
    pub sketch_value: f64,
    pub sketch_rank: usize,
    pub sketch_deviation: f64,
    pub sketch_attempts: u32,
    pub search_rank: usize,
    pub directions: u64,
    pub exhaustive: bool,
}

/// Additive PTAS: sketch at `eps/3`, net search at `eps/3`, evaluate on `A`.
pub fn solve_additive_ptas(a: &SymMatrix, k: usize, eps: f64, seed: u64, budget: &Budget) -> Result<PtasOutcome> {
    check_k(a.n(), k)?;
    let third = eps / 3.0;
    let sketch = jl_sketch(a, third, seed)?;
    let net = eps_net_search(&sketch, k, third, &NetOptions::new(budget, seed))?;
    let solution = net.solution.reevaluate(a);
    Ok(PtasOutcome {
        sketch_value: net.solution.value,
        solution,
        sketch_rank: sketch.rank(),
        sketch_deviation: sketch.deviation,
        sketch_attempts: sketch.attempts,
        search_rank: net.search_rank,
        directions: net.directions,
        exhaustive: net.exhaustive,
    })
}

/// `true` when `value` meets `bound` up to a relative `1e−9` slack.
pub fn meets(value: f64, bound: f64) -> bool {
    value >= bound - 1e-9 * (1.0 + bound.abs())
}

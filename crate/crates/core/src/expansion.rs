//! Weighted 1-regular graphs and small-set expansion.
//!
//! A [`WalkGraph`] is a symmetric nonnegative matrix with unit row sums,
//! read as the transition matrix of a random walk. The expansion of `S` is
//! the walk mass leaving `S` divided by `|S|`, and the profile `Φ_G(δ)`
//! minimizes it over nonempty sets with `|S| ≤ δn`.

use rand::Rng as _;
use serde::Serialize;

use crate::combinatorics::for_each_combination;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_sym, is_psd_default, quad_form, SymMatrix, ROW_SUM_TOL};
use crate::rng::Rng;
use crate::solvers::solve_exact;
use crate::Budget;

/// Entries above `−NEGATIVE_TOL` count as nonnegative (roundoff from
/// spectral powers).
const NEGATIVE_TOL: f64 = 1e-12;

/// Largest `n` for the exact profile.
pub const EXACT_PROFILE_MAX_N: usize = 20;

/// Largest `n` for the exhaustive `λ_δ` computation.
pub const CHEEGER_MAX_N: usize = 14;

/// Slack used when comparing the two sides of an inequality.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct WalkGraph {
    w: SymMatrix,
}

impl WalkGraph {
    /// Validates nonnegativity and unit row sums.
    pub fn new(w: SymMatrix) -> Result<Self> {
        let n = w.n();
        for i in 0..n {
            for j in 0..n {
                if w.get(i, j) < -NEGATIVE_TOL {
                    return Err(Error::NegativeWeight {
                        i,
                        j,
                        value: w.get(i, j),
                    });
                }
            }
        }
        for (row, sum) in w.row_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSum { row, sum });
            }
        }
        Ok(Self { w })
    }

    /// Builds a walk from symmetric nonnegative weights: divides by the
    /// largest weighted degree and puts each row's remaining mass on its
    /// self-loop.
    pub fn from_weights(weights: &SymMatrix) -> Result<Self> {
        let n = weights.n();
        for i in 0..n {
            for j in 0..n {
                if weights.get(i, j) < 0.0 {
                    return Err(Error::NegativeWeight {
                        i,
                        j,
                        value: weights.get(i, j),
                    });
                }
            }
        }
        let sums = weights.row_sums();
        let max = sums.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return Ok(Self {
                w: SymMatrix::identity(n),
            });
        }
        let mut w = weights.scaled(1.0 / max);
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| w.get(i, j)).sum();
            w.set(i, i, 1.0 - off);
        }
        Self::new(w)
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.w
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.w
    }

    /// `I − W`.
    pub fn laplacian(&self) -> SymMatrix {
        self.w.scaled(-1.0).shifted(1.0)
    }

    fn check_subset(&self, s: &[usize]) -> Result<()> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("subset must be nonempty".into()));
        }
        let mut seen = vec![false; self.n()];
        for &i in s {
            if i >= self.n() {
                return Err(Error::InvalidArgument(format!("vertex {i} out of range for n = {}", self.n())));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("vertex {i} repeated in subset")));
            }
        }
        Ok(())
    }
}

/// Crossing mass over `|S|` with `S` given as a membership mask.
fn expansion_mask(w: &SymMatrix, s: &[usize], inside: &[bool]) -> f64 {
    let mut cross = 0.0;
    for &i in s {
        let row = w.row(i);
        for (j, &x) in row.iter().enumerate() {
            if !inside[j] {
                cross += x;
            }
        }
    }
    cross / s.len() as f64
}

/// `Φ_G(S)`.
pub fn expansion(g: &WalkGraph, s: &[usize]) -> Result<f64> {
    g.check_subset(s)?;
    let mut inside = vec![false; g.n()];
    for &i in s {
        inside[i] = true;
    }
    Ok(expansion_mask(&g.w, s, &inside))
}

/// `xᵀWx` for the normalized indicator `x = 1_S/√|S|`, which equals
/// `1 − Φ_G(S)`.
pub fn indicator_value(g: &WalkGraph, s: &[usize]) -> Result<f64> {
    g.check_subset(s)?;
    let mut x = vec![0.0; g.n()];
    let v = 1.0 / (s.len() as f64).sqrt();
    for &i in s {
        x[i] = v;
    }
    quad_form(&g.w, &x)
}

/// Largest set size allowed at fraction `delta`.
pub fn max_set_size(n: usize, delta: f64) -> Result<usize> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let k = ((delta * n as f64) + 1e-9).floor() as usize;
    if k < 1 {
        return Err(Error::InvalidArgument(format!(
            "delta·n = {} admits no nonempty set",
            delta * n as f64
        )));
    }
    Ok(k.min(n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    /// Argmin, ascending.
    pub subset: Vec<usize>,
    /// `Φ_G(subset)`, which is the profile value.
    pub phi: f64,
    pub delta: f64,
    pub max_size: usize,
    /// False for the spectral sweep upper bound.
    pub is_exact: bool,
}

/// `Φ_G(δ)`. Exact for `n ≤ 20` (sets by size, then lexicographically; the
/// first minimum wins), otherwise a spectral sweep upper bound.
pub fn expansion_profile(g: &WalkGraph, delta: f64) -> Result<ExpansionReport> {
    let n = g.n();
    let kmax = max_set_size(n, delta)?;
    if n > EXACT_PROFILE_MAX_N {
        return spectral_sweep(g, delta, kmax);
    }
    let mut best = f64::INFINITY;
    let mut best_set = Vec::new();
    let mut inside = vec![false; n];
    for size in 1..=kmax {
        for_each_combination(n, size, |s| {
            for &i in s {
                inside[i] = true;
            }
            let phi = expansion_mask(&g.w, s, &inside);
            for &i in s {
                inside[i] = false;
            }
            if phi < best {
                best = phi;
                best_set = s.to_vec();
            }
        });
    }
    Ok(ExpansionReport {
        subset: best_set,
        phi: best,
        delta,
        max_size: kmax,
        is_exact: true,
    })
}

/// Threshold sets of the eigenvectors for the 2nd to 4th largest
/// eigenvalues of `W`, taken from both ends.
fn spectral_sweep(g: &WalkGraph, delta: f64, kmax: usize) -> Result<ExpansionReport> {
    let n = g.n();
    let spec = g.w.spectrum()?;
    let mut best = f64::INFINITY;
    let mut best_set = Vec::new();
    let mut inside = vec![false; n];
    for v in spec.eigenvectors.iter().skip(1).take(3) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
        for dir in [false, true] {
            if dir {
                order.reverse();
            }
            inside.iter_mut().for_each(|x| *x = false);
            for size in 1..=kmax {
                inside[order[size - 1]] = true;
                let mut s = order[..size].to_vec();
                s.sort_unstable();
                let phi = expansion_mask(&g.w, &s, &inside);
                if phi < best {
                    best = phi;
                    best_set = s;
                }
            }
        }
    }
    if best_set.is_empty() {
        // n = 1 has no second eigenvector
        let s = vec![0];
        best = expansion(g, &s)?;
        best_set = s;
    }
    Ok(ExpansionReport {
        subset: best_set,
        phi: best,
        delta,
        max_size: kmax,
        is_exact: false,
    })
}

/// `(I + W)/2`.
pub fn lazy(g: &WalkGraph) -> WalkGraph {
    WalkGraph {
        w: g.w.shifted(1.0).scaled(0.5),
    }
}

/// `((I + W)/2)^t` through the spectrum.
pub fn lazy_power(g: &WalkGraph, t: u32) -> Result<WalkGraph> {
    if t == 0 {
        return Err(Error::InvalidArgument("lazy power needs t >= 1".into()));
    }
    let l = lazy(g);
    if t == 1 {
        return Ok(l);
    }
    let p = l.w.spectrum()?.map_spectrum(|x| x.max(0.0).powi(t as i32));
    WalkGraph::new(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerExpandReport {
    pub t: u32,
    pub eta: f64,
    pub delta: f64,
    /// `Φ_{G_lazy^t}(δ)`.
    pub lhs: f64,
    /// `min(1 − (1 − Φ_G(4δ/η)²/32)^t, 1 − η)`.
    pub rhs: f64,
    /// `4δ/η` after clamping to 1.
    pub inner_delta: f64,
    pub clamped: bool,
    pub inner_phi: f64,
    pub holds: bool,
}

/// Evaluates both sides of the lazy-powering lower bound with exact profiles.
pub fn check_power_expand(g: &WalkGraph, t: u32, eta: f64, delta: f64) -> Result<PowerExpandReport> {
    if g.n() > EXACT_PROFILE_MAX_N {
        return Err(Error::SizeGuard(format!(
            "power-expand needs exact profiles (n <= {EXACT_PROFILE_MAX_N}), got n = {}",
            g.n()
        )));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1), got {eta}")));
    }
    let raw = 4.0 * delta / eta;
    let clamped = raw > 1.0;
    let inner_delta = raw.min(1.0);
    let inner_phi = expansion_profile(g, inner_delta)?.phi;
    let lhs = expansion_profile(&lazy_power(g, t)?, delta)?.phi;
    let decay = (1.0 - inner_phi * inner_phi / 32.0).powi(t as i32);
    let rhs = (1.0 - decay).min(1.0 - eta);
    Ok(PowerExpandReport {
        t,
        eta,
        delta,
        lhs,
        rhs,
        inner_delta,
        clamped,
        inner_phi,
        holds: lhs >= rhs - CHECK_TOL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SseReduction {
    #[serde(skip)]
    pub graph: WalkGraph,
    /// `⌈128 ln(1/η)⌉`.
    pub t: u32,
    /// `min(η, 2η/t)`.
    pub eta_prime: f64,
    /// `4/η`.
    pub m: f64,
    pub eta: f64,
}

/// Walk steps `⌈128 ln(1/η)⌉`.
pub fn sse_steps(eta: f64) -> u32 {
    (128.0 * (1.0 / eta).ln()).ceil() as u32
}

/// Replaces `G` by `G_lazy^t`, which is PSD.
pub fn psd_sse_reduce(g: &WalkGraph, eta: f64) -> Result<SseReduction> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1/2], got {eta}")));
    }
    let t = sse_steps(eta);
    let graph = lazy_power(g, t)?;
    Ok(SseReduction {
        graph,
        t,
        eta_prime: eta.min(2.0 * eta / t as f64),
        m: 4.0 / eta,
        eta,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheegerReport {
    pub delta: f64,
    pub max_size: usize,
    /// `min` of `xᵀLx/xᵀx` over `x` with at most `δn` nonzeros.
    pub lambda_delta: f64,
    pub lambda_support: Vec<usize>,
    /// Exact `Φ_G(δ)`.
    pub phi: f64,
    /// `√((2 − λ_δ)λ_δ)`.
    pub bound: f64,
    pub holds: bool,
}

/// `λ_δ` by enumerating supports of the largest allowed size, which suffices
/// since a principal submatrix's smallest eigenvalue can only grow when
/// rows are removed.
pub fn lambda_delta(g: &WalkGraph, delta: f64) -> Result<(f64, Vec<usize>)> {
    let n = g.n();
    if n > CHEEGER_MAX_N {
        return Err(Error::SizeGuard(format!(
            "lambda_delta enumeration needs n <= {CHEEGER_MAX_N}, got n = {n}"
        )));
    }
    let kmax = max_set_size(n, delta)?;
    let l = g.laplacian();
    let mut best = f64::INFINITY;
    let mut best_s = Vec::new();
    let mut err = None;
    for_each_combination(n, kmax, |s| {
        if err.is_some() {
            return;
        }
        match eigenvalues_sym(&l.principal_submatrix(s)) {
            Ok(vals) => {
                let m = vals.last().copied().unwrap_or(f64::INFINITY);
                if m < best {
                    best = m;
                    best_s = s.to_vec();
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((best, best_s))
}

/// Checks `Φ_G(δ) ≤ √((2 − λ_δ)λ_δ)` for `δ ≤ 1/2`.
pub fn check_local_cheeger(g: &WalkGraph, delta: f64) -> Result<CheegerReport> {
    if delta > 0.5 + 1e-12 {
        return Err(Error::InvalidArgument(format!("cheeger check needs delta <= 1/2, got {delta}")));
    }
    let (lam, support) = lambda_delta(g, delta)?;
    let prof = expansion_profile(g, delta)?;
    let bound = ((2.0 - lam) * lam).max(0.0).sqrt();
    Ok(CheegerReport {
        delta,
        max_size: prof.max_size,
        lambda_delta: lam,
        lambda_support: support,
        phi: prof.phi,
        bound,
        holds: prof.phi <= bound + CHECK_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Yes,
    No,
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct SseSpcaReport {
    pub k: usize,
    pub delta: f64,
    pub eta: f64,
    /// `max xᵀWx` over unit vectors with at most `k = ⌊δn⌋` nonzeros.
    pub val: f64,
    pub val_support: Vec<usize>,
    pub yes_threshold: f64,
    pub no_threshold: f64,
    /// Where `val` falls against the two thresholds.
    pub val_side: Side,
    /// Exact `Φ_G(δ)`.
    pub profile: f64,
    /// `Yes` if some small set has `Φ ≤ η`, `No` if all have `Φ ≥ 1 − η`.
    pub promise: Side,
    /// `val ≥ 1 − Φ_G(δ)`.
    pub feasible_point_bound: bool,
    /// The promise side implies the matching `val` side.
    pub consistent: bool,
    pub psd: bool,
}

/// Sparse PCA value of a walk matrix against the SSE thresholds.
pub fn sse_spca_values(g: &WalkGraph, delta: f64, eta: f64, budget: &Budget) -> Result<SseSpcaReport> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1), got {eta}")));
    }
    let n = g.n();
    if n > EXACT_PROFILE_MAX_N {
        return Err(Error::SizeGuard(format!(
            "sse-spca needs an exact profile (n <= {EXACT_PROFILE_MAX_N}), got n = {n}"
        )));
    }
    let k = max_set_size(n, delta)?;
    let sol = solve_exact(&g.w, k, budget)?;
    let prof = expansion_profile(g, delta)?;
    let yes_threshold = 1.0 - eta;
    let no_threshold = (1.0 - (1.0 - eta) * (1.0 - eta)).sqrt();
    let val = sol.value;
    let val_side = if val >= yes_threshold - CHECK_TOL {
        Side::Yes
    } else if val <= no_threshold + CHECK_TOL {
        Side::No
    } else {
        Side::Neither
    };
    let promise = if prof.phi <= eta {
        Side::Yes
    } else if prof.phi >= 1.0 - eta {
        Side::No
    } else {
        Side::Neither
    };
    let consistent = match promise {
        Side::Yes => val >= yes_threshold - CHECK_TOL,
        Side::No => val <= no_threshold + CHECK_TOL,
        Side::Neither => true,
    };
    Ok(SseSpcaReport {
        k,
        delta,
        eta,
        val,
        val_support: sol.support,
        yes_threshold,
        no_threshold,
        val_side,
        profile: prof.phi,
        promise,
        feasible_point_bound: val >= 1.0 - prof.phi - CHECK_TOL,
        consistent,
        psd: is_psd_default(&g.w)?.is_psd,
    })
}

/// Random walk graph: each pair is an edge with probability `edge_prob` and
/// weight uniform in `(0, 1]`, normalized by [`WalkGraph::from_weights`].
pub fn random_walk_graph(n: usize, edge_prob: f64, rng: &mut Rng) -> Result<WalkGraph> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut w = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_prob {
                let x = 1.0 - rng.random::<f64>();
                w.set(i, j, x);
                w.set(j, i, x);
            }
        }
    }
    WalkGraph::from_weights(&w)
}

/// Parses a weighted edge list: `u v w` lines (undirected), `selfloop u w`
/// lines, optional `n <count>`, `#` comments. Weights are normalized by
/// [`WalkGraph::from_weights`].
pub fn parse_edge_list(text: &str) -> Result<WalkGraph> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_vertex = None::<usize>;
    let parse_vertex = |tok: &str, line: usize| -> Result<usize> {
        tok.parse()
            .map_err(|_| Error::parse(line, format!("invalid vertex `{tok}`")))
    };
    let parse_weight = |tok: &str, line: usize| -> Result<f64> {
        let w: f64 = tok
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid weight `{tok}`")))?;
        if !w.is_finite() || w < 0.0 {
            return Err(Error::parse(line, format!("weight must be finite and >= 0, got {w}")));
        }
        Ok(w)
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let (u, v, w) = match toks.as_slice() {
            ["n", count] => {
                declared_n = Some(parse_vertex(count, line_no)?);
                continue;
            }
            ["selfloop", u, w] => {
                let u = parse_vertex(u, line_no)?;
                (u, u, parse_weight(w, line_no)?)
            }
            [u, v, w] => (parse_vertex(u, line_no)?, parse_vertex(v, line_no)?, parse_weight(w, line_no)?),
            _ => return Err(Error::parse(line_no, "expected `u v w` or `selfloop u w`")),
        };
        max_vertex = Some(max_vertex.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let n = match (declared_n, max_vertex) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::InvalidArgument(format!("vertex {m} exceeds declared n = {n}")));
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(Error::EmptyMatrix),
    };
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut weights = SymMatrix::zeros(n);
    for (u, v, w) in edges {
        weights.set(u, v, weights.get(u, v) + w);
        if u != v {
            weights.set(v, u, weights.get(v, u) + w);
        }
    }
    WalkGraph::from_weights(&weights)
}

/// Writes `g` in the edge-list format (upper triangle plus self-loops).
pub fn format_edge_list(g: &WalkGraph) -> String {
    let n = g.n();
    let mut out = format!("n {n}\n");
    for i in 0..n {
        if g.w.get(i, i) != 0.0 {
            out.push_str(&format!("selfloop {i} {:?}\n", g.w.get(i, i)));
        }
        for j in i + 1..n {
            if g.w.get(i, j) != 0.0 {
                out.push_str(&format!("{i} {j} {:?}\n", g.w.get(i, j)));
            }
        }
    }
    out
}

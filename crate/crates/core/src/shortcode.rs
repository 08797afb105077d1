//! The Reed–Muller Cayley graph and its SDP gap instance.
//!
//! Codewords of `RM(m, d)` are indexed by their coefficient vectors over the
//! monomials of degree `≤ d` (degree first, then lexicographic), with the
//! constant monomial as the most significant bit. Index order is therefore
//! lexicographic over coefficient vectors, and adding two codewords is XOR of
//! their indices.
//!
//! The walk steps from `f` to `f ⊕ g` where `g` is the product of an ordered
//! `d`-tuple of affine forms whose linear parts are linearly independent. The
//! tuple is uniform, so a product reached by several tuples carries their
//! combined weight.
//!
//! Every matrix here is a Cayley matrix `M_{f,g} = c(f ⊕ g)` on `F₂^r`, so
//! its eigenvalues are the Walsh–Hadamard transform of `c`.

use std::collections::HashMap;

use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::linalg::{expm_walk, SymMatrix};

/// Default cap on the number of codewords.
pub const DEFAULT_MAX_CODEWORDS: usize = 4096;

/// Largest code for which `A` is formed by the dense eigensolver; larger
/// codes go through the Walsh–Hadamard transform.
pub const DENSE_EXPM_MAX_N: usize = 256;

/// `Σ_{r ≤ d} C(m, r)`.
pub fn dimension(m: usize, d: usize) -> usize {
    (0..=d.min(m)).map(|r| binomial(m, r) as usize).sum()
}

/// In-place unnormalized Walsh–Hadamard transform; `v.len()` must be a
/// power of two.
pub fn fwht(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `(a ⊛ b)(h) = Σ_g a(g) b(h ⊕ g)`.
pub fn xor_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    fwht(&mut x);
    fwht(&mut y);
    for (p, q) in x.iter_mut().zip(&y) {
        *p *= q;
    }
    fwht(&mut x);
    x.iter_mut().for_each(|v| *v /= n as f64);
    x
}

#[derive(Debug, Clone)]
pub struct ReedMullerCode {
    pub m: usize,
    pub d: usize,
    /// Variable masks, in canonical order.
    pub monomials: Vec<u32>,
    /// `tables[f][x] = f(x)` with `x` read as a bit vector (bit `i` = `xᵢ`).
    tables: Vec<Vec<u8>>,
}

impl ReedMullerCode {
    /// Number of codewords.
    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Number of evaluation points `2^m`.
    pub fn points(&self) -> usize {
        1 << self.m
    }

    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }

    pub fn truth_table(&self, f: usize) -> &[u8] {
        &self.tables[f]
    }

    /// Codeword index of a coefficient vector given as monomial masks.
    fn index_of_masks(&self, pos: &HashMap<u32, usize>, coeffs: impl Iterator<Item = u32>) -> Option<usize> {
        let r = self.dimension();
        let mut idx = 0usize;
        for mask in coeffs {
            let j = *pos.get(&mask)?;
            idx ^= 1 << (r - 1 - j);
        }
        Some(idx)
    }
}

/// Monomials of degree `≤ d` in `m` variables: by degree, then lexicographic
/// on the sorted variable list.
fn monomials(m: usize, d: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for deg in 0..=d.min(m) {
        crate::combinatorics::for_each_combination(m, deg, |vars| {
            out.push(vars.iter().fold(0u32, |acc, &v| acc | 1 << v));
        });
    }
    out
}

/// All codewords of `RM(m, d)`.
pub fn enumerate_rm(m: usize, d: usize, max_codewords: usize) -> Result<ReedMullerCode> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidArgument(format!("need 1 <= m <= 20, got {m}")));
    }
    let r = dimension(m, d);
    if r >= usize::BITS as usize - 1 || (1usize << r) > max_codewords {
        return Err(Error::SizeGuard(format!(
            "RM({m},{d}) has 2^{r} codewords, above the limit of {max_codewords}"
        )));
    }
    let monos = monomials(m, d);
    let points = 1usize << m;
    let mono_tables: Vec<Vec<u8>> = monos
        .iter()
        .map(|&mask| (0..points).map(|x| u8::from(x as u32 & mask == mask)).collect())
        .collect();
    let n = 1usize << r;
    let tables = (0..n)
        .map(|f| {
            let mut t = vec![0u8; points];
            for (j, mt) in mono_tables.iter().enumerate() {
                if f >> (r - 1 - j) & 1 == 1 {
                    for (a, b) in t.iter_mut().zip(mt) {
                        *a ^= b;
                    }
                }
            }
            t
        })
        .collect();
    Ok(ReedMullerCode {
        m,
        d,
        monomials: monos,
        tables,
    })
}

/// Algebraic normal form of a truth table: coefficient of each variable mask.
fn anf(table: &[u8]) -> Vec<u8> {
    let mut c = table.to_vec();
    let n = c.len();
    let mut h = 1;
    while h < n {
        for x in 0..n {
            if x & h != 0 {
                c[x] ^= c[x ^ h];
            }
        }
        h *= 2;
    }
    c
}

/// Walk distribution over codewords.
#[derive(Debug, Clone, Serialize)]
pub struct Generators {
    /// `multiplicity[g]` counts the tuples whose product is codeword `g`.
    pub multiplicity: Vec<u64>,
    /// Number of tuples.
    pub tuples: u64,
}

impl Generators {
    pub fn distinct(&self) -> usize {
        self.multiplicity.iter().filter(|&&c| c > 0).count()
    }

    pub fn probability(&self, g: usize) -> f64 {
        self.multiplicity[g] as f64 / self.tuples as f64
    }

    pub fn distribution(&self) -> Vec<f64> {
        (0..self.multiplicity.len()).map(|g| self.probability(g)).collect()
    }
}

/// `true` if the vectors (bit masks over `F₂^m`) are linearly independent.
fn independent(vectors: &[u32]) -> bool {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x == 0 {
            return false;
        }
        basis.push(x);
        basis.sort_unstable_by(|a, b| b.cmp(a));
    }
    true
}

/// Enumerates ordered `d`-tuples `(a₁·x + b₁, …, a_d·x + b_d)` with linearly
/// independent `aᵢ` and accumulates their products.
pub fn build_generators(code: &ReedMullerCode) -> Result<Generators> {
    let (m, d) = (code.m, code.d);
    if d == 0 || d > m {
        return Err(Error::InvalidArgument(format!("generators need 1 <= d <= m, got d = {d}, m = {m}")));
    }
    let points = code.points();
    let pos: HashMap<u32, usize> = code.monomials.iter().enumerate().map(|(j, &mk)| (mk, j)).collect();
    let mut multiplicity = vec![0u64; code.len()];
    let mut tuples = 0u64;
    let mut linear = vec![0u32; d];
    let mut product = vec![0u8; points];

    // odometer over linear parts in [1, 2^m)^d, then constants in {0,1}^d
    let top = (1u32 << m) - 1;
    linear.iter_mut().for_each(|a| *a = 1);
    loop {
        if independent(&linear) {
            for consts in 0..(1u32 << d) {
                product.iter_mut().for_each(|p| *p = 1);
                for (i, &a) in linear.iter().enumerate() {
                    let b = (consts >> i & 1) as u8;
                    for (x, p) in product.iter_mut().enumerate() {
                        let dotbit = ((x as u32 & a).count_ones() & 1) as u8;
                        *p &= dotbit ^ b;
                    }
                }
                let coeffs = anf(&product);
                let idx = code
                    .index_of_masks(
                        &pos,
                        coeffs.iter().enumerate().filter(|(_, &c)| c == 1).map(|(mk, _)| mk as u32),
                    )
                    .expect("a product of d affine forms has degree <= d");
                multiplicity[idx] += 1;
                tuples += 1;
            }
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(Generators { multiplicity, tuples });
            }
            if linear[i] < top {
                linear[i] += 1;
                break;
            }
            linear[i] = 1;
            i += 1;
        }
    }
}

/// Parameters derived from `(m, d, ε₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortCodeParams {
    pub m: usize,
    pub d: usize,
    pub eps2: f64,
    /// Codeword count.
    pub n: usize,
    /// `2^{d−1}`.
    pub t: f64,
    /// `2^{−m/2}`.
    pub delta: f64,
    /// `n·δ`, not rounded.
    pub k: f64,
    /// `⌊k⌋`, used by sparse solvers.
    pub k_sparse: usize,
    /// `ε₂·2^{d+1}`.
    pub ell: f64,
    /// `e^{−ℓ}`.
    pub eta: f64,
}

impl ShortCodeParams {
    pub fn new(m: usize, d: usize, eps2: f64) -> Result<Self> {
        if !(eps2 > 0.0 && eps2 < 1.0) {
            return Err(Error::InvalidArgument(format!("eps2 must lie in (0, 1), got {eps2}")));
        }
        if d == 0 || d > m {
            return Err(Error::InvalidArgument(format!("need 1 <= d <= m, got d = {d}, m = {m}")));
        }
        let r = dimension(m, d);
        if r >= 63 {
            return Err(Error::SizeGuard(format!("RM({m},{d}) has 2^{r} codewords")));
        }
        let n = 1usize << r;
        let delta = 2f64.powf(-(m as f64) / 2.0);
        let k = n as f64 * delta;
        let ell = eps2 * 2f64.powi(d as i32 + 1);
        Ok(Self {
            m,
            d,
            eps2,
            n,
            t: 2f64.powi(d as i32 - 1),
            delta,
            k,
            k_sparse: (k + 1e-9).floor() as usize,
            ell,
            eta: (-ell).exp(),
        })
    }

    /// Degree from the coupled parameter chain: `δ = 2^{−m/2}`,
    /// `η = δ^{1/(4 ln 3)}`, `d = ⌈log₂ log₂(1/η) + log₂(1/ε₂) − 1⌉`,
    /// clamped to at least 1.
    pub fn paper_preset(m: usize, eps2: f64) -> Result<Self> {
        let delta = 2f64.powf(-(m as f64) / 2.0);
        let eta = delta.powf(1.0 / (4.0 * 3f64.ln()));
        let raw = (1.0 / eta).log2().log2() + (1.0 / eps2).log2() - 1.0;
        let d = raw.ceil().max(1.0) as usize;
        if d > m {
            return Err(Error::InvalidArgument(format!(
                "preset degree d = {d} exceeds m = {m}; increase m"
            )));
        }
        Self::new(m, d, eps2)
    }
}

/// `η + 3^ℓ·√(k/n)`, the rank-1 value bound (`(1/η)^{ln 3} = 3^ℓ`).
pub fn soundness_bound(p: &ShortCodeParams) -> f64 {
    p.eta + 3f64.powf(p.ell) * (p.k / p.n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpmRoute {
    /// Jacobi eigendecomposition of the dense walk matrix.
    Dense,
    /// Walsh–Hadamard transform of the generator distribution.
    Walsh,
}

#[derive(Debug, Clone)]
pub struct ShortCodeInstance {
    pub code: ReedMullerCode,
    pub generators: Generators,
    pub params: ShortCodeParams,
    /// `G_{f,g} = p(f ⊕ g)`.
    pub walk: SymMatrix,
    /// `A = e^{−t(I − G)}`.
    pub a: SymMatrix,
    /// `A_{f,g} = a_kernel[f ⊕ g]`, from the Walsh route.
    pub a_kernel: Vec<f64>,
    pub route: ExpmRoute,
}

fn cayley(kernel: &[f64]) -> SymMatrix {
    SymMatrix::from_fn(kernel.len(), |f, g| kernel[f ^ g])
}

/// `A`'s kernel: `WHT⁻¹(e^{−t(1 − WHT(p))})`.
pub fn walk_exponential_kernel(p: &[f64], t: f64) -> Vec<f64> {
    let n = p.len();
    let mut spec = p.to_vec();
    fwht(&mut spec);
    for v in spec.iter_mut() {
        *v = (-t * (1.0 - *v)).exp();
    }
    fwht(&mut spec);
    spec.iter_mut().for_each(|v| *v /= n as f64);
    spec
}

pub fn build_instance(m: usize, d: usize, eps2: f64) -> Result<ShortCodeInstance> {
    build_instance_with(ShortCodeParams::new(m, d, eps2)?, DEFAULT_MAX_CODEWORDS)
}

pub fn build_instance_with(params: ShortCodeParams, max_codewords: usize) -> Result<ShortCodeInstance> {
    let code = enumerate_rm(params.m, params.d, max_codewords)?;
    let generators = build_generators(&code)?;
    let p = generators.distribution();
    let walk = cayley(&p);
    let a_kernel = walk_exponential_kernel(&p, params.t);
    let (a, route) = if code.len() <= DENSE_EXPM_MAX_N {
        (expm_walk(&walk, params.t)?, ExpmRoute::Dense)
    } else {
        (cayley(&a_kernel), ExpmRoute::Walsh)
    };
    Ok(ShortCodeInstance {
        code,
        generators,
        params,
        walk,
        a,
        a_kernel,
        route,
    })
}

impl ShortCodeInstance {
    pub fn n(&self) -> usize {
        self.code.len()
    }

    /// `φ_x(f) = (−1)^{f(x)}`.
    pub fn character(&self, x: usize) -> Vec<f64> {
        (0..self.n())
            .map(|f| if self.code.truth_table(f)[x] == 1 { -1.0 } else { 1.0 })
            .collect()
    }

    /// `M·v` for `M ∈ {G, A}`: dense for small codes, XOR convolution with
    /// the kernel otherwise.
    fn apply(&self, dense: &SymMatrix, kernel: &[f64], v: &[f64]) -> Vec<f64> {
        if self.n() <= DENSE_EXPM_MAX_N {
            dense.matvec(v).expect("dimension checked by construction")
        } else {
            xor_convolve(kernel, v)
        }
    }

    /// Largest `‖Gφ_x − (1 − 2^{1−d})φ_x‖_∞` and `‖Aφ_x − e^{−t 2^{1−d}}φ_x‖_∞`
    /// over all `x ∈ F₂^m`.
    pub fn character_residuals(&self) -> CharacterReport {
        let lambda = 1.0 - 2f64.powi(1 - self.params.d as i32);
        let mu = (-self.params.t * (1.0 - lambda)).exp();
        let p = self.generators.distribution();
        let mut walk_residual = 0.0f64;
        let mut a_residual = 0.0f64;
        for x in 0..self.code.points() {
            let phi = self.character(x);
            let gphi = self.apply(&self.walk, &p, &phi);
            let aphi = self.apply(&self.a, &self.a_kernel, &phi);
            for f in 0..self.n() {
                walk_residual = walk_residual.max((gphi[f] - lambda * phi[f]).abs());
                a_residual = a_residual.max((aphi[f] - mu * phi[f]).abs());
            }
        }
        CharacterReport {
            walk_eigenvalue: lambda,
            a_eigenvalue: mu,
            walk_residual,
            a_residual,
        }
    }

    /// Eigenvalues of `A` from its kernel, descending.
    pub fn a_eigenvalues(&self) -> Vec<f64> {
        let mut v = self.a_kernel.clone();
        fwht(&mut v);
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacterReport {
    pub walk_eigenvalue: f64,
    pub a_eigenvalue: f64,
    pub walk_residual: f64,
    pub a_residual: f64,
}

/// Standard embedding `w_f(x) = (−1)^{f(x)}` with inner product `E_x`.
#[derive(Debug, Clone)]
pub struct SdpGramSolution {
    /// `vectors[f]` has length `2^m`.
    pub vectors: Vec<Vec<f64>>,
    /// `inner[h] = ⟨w_f, w_{f⊕h}⟩`, which depends only on `h`.
    pub inner: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdpSummary {
    /// `E_f ⟨w_f, w_f⟩`.
    pub mean_norm: f64,
    /// `E_{f,g} |⟨w_f, w_g⟩|`.
    pub mean_abs_inner: f64,
    /// `E_f ⟨w_f, (Aw)_f⟩`.
    pub objective: f64,
}

fn inner(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / u.len() as f64
}

pub fn build_sdp_solution(inst: &ShortCodeInstance) -> SdpGramSolution {
    let n = inst.n();
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|f| {
            inst.code
                .truth_table(f)
                .iter()
                .map(|&b| if b == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect();
    let inner = (0..n).map(|h| inner(&vectors[0], &vectors[h])).collect();
    SdpGramSolution { vectors, inner }
}

impl SdpGramSolution {
    /// `X_{f,g} = ⟨w_f, w_g⟩/n`.
    pub fn gram(&self) -> SymMatrix {
        let n = self.vectors.len();
        SymMatrix::from_fn(n, |f, g| inner(&self.vectors[f], &self.vectors[g]) / n as f64)
    }

    /// Summary statistics, with `Aw` computed one evaluation point at a time.
    pub fn summary(&self, inst: &ShortCodeInstance) -> SdpSummary {
        let n = self.vectors.len();
        let points = inst.code.points();
        let mean_norm = self.vectors.iter().map(|w| inner(w, w)).sum::<f64>() / n as f64;
        let mean_abs_inner = self.inner.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        let mut objective = 0.0;
        let mut column = vec![0.0; n];
        for x in 0..points {
            for (c, w) in column.iter_mut().zip(&self.vectors) {
                *c = w[x];
            }
            let aw = inst.apply(&inst.a, &inst.a_kernel, &column);
            objective += column.iter().zip(&aw).map(|(a, b)| a * b).sum::<f64>();
        }
        SdpSummary {
            mean_norm,
            mean_abs_inner,
            objective: objective / (points * n) as f64,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SdpFeasibility {
    pub trace: f64,
    /// `1ᵀ|X|1`.
    pub l1_mass: f64,
    pub k: f64,
    pub min_eigenvalue: f64,
    /// `tr(AX)`.
    pub trace_ax: f64,
    /// `E_f ⟨w_f, (Aw)_f⟩`.
    pub expectation: f64,
    pub trace_ok: bool,
    pub l1_ok: bool,
    pub psd_ok: bool,
    pub value_identity_ok: bool,
}

impl SdpFeasibility {
    pub fn feasible(&self) -> bool {
        self.trace_ok && self.l1_ok && self.psd_ok
    }
}

/// Checks `tr X = 1`, `1ᵀ|X|1 ≤ k`, `X ⪰ 0` and the two value forms.
pub fn sdp_feasibility(inst: &ShortCodeInstance, sol: &SdpGramSolution) -> Result<SdpFeasibility> {
    let n = inst.n();
    let x = sol.gram();
    let trace = x.trace();
    let l1_mass: f64 = x.as_slice().iter().map(|v| v.abs()).sum();
    let min_eigenvalue = if n <= DENSE_EXPM_MAX_N {
        x.spectrum()?.min_eigenvalue()
    } else {
        let mut k: Vec<f64> = sol.inner.iter().map(|v| v / n as f64).collect();
        fwht(&mut k);
        k.into_iter().fold(f64::INFINITY, f64::min)
    };
    let trace_ax: f64 = inst.a.as_slice().iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
    let expectation = sol.summary(inst).objective;
    let k = inst.params.k;
    Ok(SdpFeasibility {
        trace,
        l1_mass,
        k,
        min_eigenvalue,
        trace_ax,
        expectation,
        trace_ok: (trace - 1.0).abs() <= 1e-9,
        l1_ok: l1_mass <= k + 1e-6,
        psd_ok: min_eigenvalue >= -1e-9,
        value_identity_ok: (trace_ax - expectation).abs() <= 1e-9,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub schema: u32,
    pub params: ShortCodeParams,
    pub route: ExpmRoute,
    pub sdp_value: f64,
    pub rank1_upper_bound: f64,
    pub rank1_exact_if_computed: Option<f64>,
    /// `sdp_value / max(rank1_upper_bound, rank1_exact)`.
    pub ratio: f64,
    pub feasibility: SdpFeasibility,
}

/// Summarizes both sides of the gap; `rank1_exact` comes from a sparse
/// solver on `A` at `k = ⌊n·2^{−m/2}⌋` when the caller computed it.
pub fn gap_report(inst: &ShortCodeInstance, rank1_exact: Option<f64>) -> Result<GapReport> {
    let sol = build_sdp_solution(inst);
    let feasibility = sdp_feasibility(inst, &sol)?;
    let bound = soundness_bound(&inst.params);
    let denom = rank1_exact.map_or(bound, |e| bound.max(e));
    Ok(GapReport {
        schema: 1,
        params: inst.params,
        route: inst.route,
        sdp_value: feasibility.trace_ax,
        rank1_upper_bound: bound,
        rank1_exact_if_computed: rank1_exact,
        ratio: feasibility.trace_ax / denom,
        feasibility,
    })
}

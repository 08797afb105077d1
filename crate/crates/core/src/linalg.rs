//! Dense symmetric linear algebra.
//!
//! Everything downstream works with [`SymMatrix`]: a dense, exactly symmetric
//! real matrix that lazily caches its full spectral decomposition. The
//! eigensolver is cyclic Jacobi, which is deterministic and accurate to a few
//! ulps of `‖A‖` at the sizes this crate targets (n up to a few hundred).

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius threshold at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-12;
/// Sweep limit for Jacobi.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Default PSD tolerance, multiplied by `1 + ‖A‖_max`.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Symmetry tolerance applied when matrices are ingested from text.
pub const INGEST_SYMMETRY_TOL: f64 = 1e-12;
/// Row-sum tolerance for inputs of [`expm_walk`].
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Dense real symmetric matrix, stored as a full row-major array.
///
/// Every constructor and mutator writes both triangles, so
/// `get(i, j) == get(j, i)` holds bit-for-bit.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
    spectrum: OnceLock<SpectralDecomp>,
}

impl PartialEq for SymMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data == other.data
    }
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "SymMatrix needs n >= 1");
        Self {
            n,
            data: vec![0.0; n * n],
            spectrum: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// All-ones matrix `J = 11ᵀ`.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| 1.0)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Ingests a square array. Pairs within `tol` of each other are averaged,
    /// anything further apart is rejected.
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (rows[i][j] - rows[j][i]).abs();
                if gap > tol || gap.is_nan() {
                    return Err(Error::NotSymmetric { i, j, gap, tol });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| {
            if i == j {
                rows[i][i]
            } else {
                0.5 * (rows[i][j] + rows[j][i])
            }
        }))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`; drops any cached spectrum.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
        self.spectrum = OnceLock::new();
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map_entries(|v| c * v)
    }

    pub fn map_entries(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        self.check_dim(other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            spectrum: OnceLock::new(),
        })
    }

    /// `self + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += shift;
        }
        m.spectrum = OnceLock::new();
        m
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok((0..self.n).map(|i| dot(self.row(i), x)).collect())
    }

    /// Product of two symmetric matrices that are known to commute, symmetrized
    /// from the upper triangle.
    pub fn mul_commuting(&self, other: &SymMatrix) -> Result<Self> {
        self.check_dim(other.n)?;
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).map(|l| self.get(i, l) * other.get(l, j)).sum()
        }))
    }

    /// Cached full spectral decomposition.
    pub fn spectrum(&self) -> Result<&SpectralDecomp> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = jacobi_decompose(self)?;
        let _ = self.spectrum.set(s);
        Ok(self.spectrum.get().expect("spectrum just set"))
    }

    fn check_dim(&self, m: usize) -> Result<()> {
        if m != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: m,
            });
        }
        Ok(())
    }
}

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectralDecomp {
    pub fn top(&self) -> (f64, &[f64]) {
        (self.eigenvalues[0], &self.eigenvectors[0])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("n >= 1")
    }

    /// `V f(Λ) Vᵀ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let n = self.eigenvalues.len();
        SymMatrix::from_fn(n, |i, j| {
            self.eigenvectors
                .iter()
                .zip(&weights)
                .map(|(v, w)| w * v[i] * v[j])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map_spectrum(|l| l)
    }

    /// `max |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

/// Full spectral decomposition of `a` (cached on the matrix).
pub fn eig_sym(a: &SymMatrix) -> Result<SpectralDecomp> {
    a.spectrum().cloned()
}

/// Eigenvalues only, sorted descending. Does not touch the cache.
pub fn eigenvalues_sym(a: &SymMatrix) -> Result<Vec<f64>> {
    let mut work = a.data.clone();
    let mut vals = jacobi_in_place(&mut work, a.n, None)?;
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

fn jacobi_decompose(a: &SymMatrix) -> Result<SpectralDecomp> {
    let n = a.n;
    let mut work = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let vals = jacobi_in_place(&mut work, n, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their original index order
    order.sort_by(|&x, &y| vals[y].total_cmp(&vals[x]));

    let eigenvalues = order.iter().map(|&i| vals[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&c| {
            let mut col: Vec<f64> = (0..n).map(|r| v[r * n + c]).collect();
            canonical_sign(&mut col);
            col
        })
        .collect();
    Ok(SpectralDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// Flips `v` so that its first largest-magnitude entry is positive.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on a row-major symmetric array. Returns the unsorted
/// diagonal; accumulates rotations into `v` (columns = eigenvectors) if given.
pub(crate) fn jacobi_in_place(a: &mut [f64], n: usize, mut v: Option<&mut [f64]>) -> Result<Vec<f64>> {
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * scale;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(a, n);
        if off <= threshold {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                residual: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_p = c * arp - s * arq;
                    let new_q = s * arp + c * arq;
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + q] = new_q;
                    a[q * n + r] = new_q;
                }
                if let Some(v) = v.as_deref_mut() {
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = c * vrp - s * vrq;
                        v[r * n + q] = s * vrp + c * vrq;
                    }
                }
            }
        }
    }
    unreachable!("loop returns on the final sweep")
}

/// In-place Cholesky attempt on a row-major `n×n` array; true iff every pivot
/// is strictly positive. The array is destroyed.
pub(crate) fn cholesky_succeeds(m: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = m[j * n + j];
        for l in 0..j {
            d -= m[j * n + l] * m[j * n + l];
        }
        if d <= 0.0 || d.is_nan() {
            return false;
        }
        let d = d.sqrt();
        m[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for l in 0..j {
                s -= m[i * n + l] * m[j * n + l];
            }
            m[i * n + j] = s / d;
        }
    }
    true
}

/// `e^{−t(I−G)}` for a symmetric matrix with unit row sums, via the spectrum of `G`.
pub fn expm_walk(g: &SymMatrix, t: f64) -> Result<SymMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("walk time t must be >= 0, got {t}")));
    }
    for (row, sum) in g.row_sums().into_iter().enumerate() {
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::RowSum { row, sum });
        }
    }
    Ok(g.spectrum()?.map_spectrum(|l| (-t * (1.0 - l)).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// PSD test with an absolute tolerance on the smallest eigenvalue.
pub fn is_psd(a: &SymMatrix, tol: f64) -> Result<PsdReport> {
    let min_eigenvalue = a.spectrum()?.min_eigenvalue();
    Ok(PsdReport {
        is_psd: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// PSD test at the default tolerance `1e−9·(1 + ‖A‖_max)`.
pub fn is_psd_default(a: &SymMatrix) -> Result<PsdReport> {
    is_psd(a, DEFAULT_PSD_TOL * (1.0 + a.max_abs()))
}

/// `xᵀAx`.
pub fn quad_form(a: &SymMatrix, x: &[f64]) -> Result<f64> {
    a.check_dim(x.len())?;
    Ok((0..a.n).map(|i| x[i] * dot(a.row(i), x)).sum())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Parses the matrix text format: `n` on the first line, then `n` rows of `n`
/// whitespace-separated decimals. Blank lines and `#` comments are skipped.
pub fn parse_matrix(text: &str) -> Result<SymMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or_else(|| Error::parse(1, "empty matrix file"))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::parse(first, format!("expected dimension, found {header:?}")))?;
    if n == 0 {
        return Err(Error::parse(first, "dimension must be >= 1"));
    }
    let mut rows = Vec::with_capacity(n);
    let mut last_line = first;
    for _ in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(last_line + 1, format!("expected {n} rows, found {}", rows.len())))?;
        last_line = line_no;
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(line_no, format!("invalid number {tok:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != n {
            return Err(Error::parse(line_no, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::parse(line_no, "trailing content after matrix rows"));
    }
    SymMatrix::from_rows(&rows, INGEST_SYMMETRY_TOL)
}

/// Writes the matrix text format with shortest round-trip decimals.
pub fn format_matrix(a: &SymMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", a.n);
    for i in 0..a.n {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::random_symmetric;

    #[test]
    fn diagonal_matrix_has_axis_eigenvectors() {
        let d = eig_sym(&SymMatrix::diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(d.eigenvectors[0], vec![0.0, 1.0]);
        assert_eq!(d.eigenvectors[1], vec![1.0, 0.0]);
    }

    #[test]
    fn two_by_two_standard_case() {
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]], 0.0).unwrap();
        let d = eig_sym(&a).unwrap();
        assert!((d.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.eigenvectors[0][0] - h).abs() < 1e-14 && (d.eigenvectors[0][1] - h).abs() < 1e-14);
        assert!((d.eigenvectors[1][0].abs() - h).abs() < 1e-14);
        assert!((d.eigenvectors[1][0] + d.eigenvectors[1][1]).abs() < 1e-14);
    }

    #[test]
    fn ties_keep_original_index_order() {
        let d = eig_sym(&SymMatrix::identity(3)).unwrap();
        assert_eq!(d.eigenvectors[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(d.eigenvectors[2], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn random_seed_7_reconstructs() {
        let a = random_symmetric(8, 7);
        let d = eig_sym(&a).unwrap();
        let r = d.reconstruct();
        let err = a.as_slice().iter().zip(r.as_slice()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err <= 1e-8 * (1.0 + a.max_abs()), "residual {err}");
        assert!(d.orthonormality_residual() <= 1e-8);
        // deterministic
        assert_eq!(eig_sym(&random_symmetric(8, 7)).unwrap(), d);
    }

    #[test]
    fn residuals_on_100_seeds() {
        for seed in 0..100u64 {
            let n = 1 + (seed as usize * 37) % 64;
            let a = random_symmetric(n, seed);
            let d = eig_sym(&a).unwrap();
            let r = d.reconstruct();
            let err = a.as_slice().iter().zip(r.as_slice()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(err <= 1e-8 * (1.0 + a.max_abs()), "seed {seed} n {n}: residual {err}");
            assert!(d.orthonormality_residual() <= 1e-8, "seed {seed}");
            assert!(d.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn large_entries_still_converge() {
        let a = random_symmetric(16, 3).scaled(2.5e4).shifted(1e4);
        let d = eig_sym(&a).unwrap();
        let vals = eigenvalues_sym(&a).unwrap();
        for (x, y) in d.eigenvalues.iter().zip(&vals) {
            assert!((x - y).abs() <= 1e-9 * a.max_abs());
        }
    }

    #[test]
    fn expm_of_identity_walk_is_identity() {
        let e = expm_walk(&SymMatrix::identity(4), 3.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn expm_of_swap_walk() {
        let g = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 0.0).unwrap();
        let e = expm_walk(&g, 1.0).unwrap();
        let d = eig_sym(&e).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - (-2.0f64).exp()).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.eigenvectors[0][0] - h).abs() < 1e-12 && (d.eigenvectors[0][1] - h).abs() < 1e-12);
        // closed form: (1 ± e^{-2})/2
        assert!((e.get(0, 0) - 0.5 * (1.0 + (-2.0f64).exp())).abs() < 1e-14);
        assert!((e.get(0, 1) - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn expm_rejects_bad_row_sums_and_negative_time() {
        let g = SymMatrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.5]], 0.0).unwrap();
        assert!(matches!(expm_walk(&g, 1.0), Err(Error::RowSum { row: 0, .. })));
        assert!(expm_walk(&SymMatrix::identity(2), -1.0).is_err());
    }

    #[test]
    fn psd_examples() {
        let r = is_psd(&SymMatrix::identity(3), 1e-9).unwrap();
        assert!(r.is_psd && (r.min_eigenvalue - 1.0).abs() < 1e-15);
        let swap = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 0.0).unwrap();
        let r = is_psd(&swap, 1e-9).unwrap();
        assert!(!r.is_psd && (r.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn quad_form_examples() {
        let x = [0.6, 0.0, -0.8];
        assert!((quad_form(&SymMatrix::identity(3), &x).unwrap() - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = quad_form(&SymMatrix::ones(4), &[h, 0.0, h, 0.0]).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert!(matches!(
            quad_form(&SymMatrix::identity(3), &[1.0]),
            Err(Error::DimensionMismatch { expected: 3, actual: 1 })
        ));
    }

    #[test]
    fn quad_form_matches_naive_triple_loop() {
        for seed in 0..20 {
            let a = random_symmetric(9, seed);
            let x: Vec<f64> = (0..9).map(|i| ((i as f64 + 1.3) * (seed as f64 + 0.7)).sin()).collect();
            let mut naive = 0.0;
            for i in 0..9 {
                for j in 0..9 {
                    naive += x[i] * a.get(i, j) * x[j];
                }
            }
            assert!((quad_form(&a, &x).unwrap() - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let a = random_symmetric(5, 11);
        assert_eq!(parse_matrix(&format_matrix(&a)).unwrap(), a);

        let nearly = "2\n1 0.5\n0.5000000000001 1\n";
        let m = parse_matrix(nearly).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));

        match parse_matrix("2\n1 0.5\n0.6 1\n") {
            Err(Error::NotSymmetric { i: 0, j: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_matrix("2\n1 0.5\n0.5 x\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_matrix("3\n1 0 0\n0 1 0\n") {
            Err(Error::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cholesky_detects_definiteness() {
        let mut pd = SymMatrix::identity(3).as_slice().to_vec();
        assert!(cholesky_succeeds(&mut pd, 3));
        let mut indefinite = vec![0.0, 1.0, 1.0, 0.0];
        assert!(!cholesky_succeeds(&mut indefinite, 2));
    }
}

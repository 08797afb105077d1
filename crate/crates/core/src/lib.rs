//! Sparse PCA: approximation algorithms, hardness-reduction instance
//! generators, and brute-force oracles that check the guarantees at small
//! sizes.
//!
//! The objective throughout is `max xᵀAx` over unit vectors with at most `k`
//! nonzero entries.
//!
//! | module | contents |
//! |--------|----------|
//! | [`linalg`] | [`SymMatrix`], Jacobi eigensolver, walk exponential, PSD test |
//! | [`solvers`] | exact enumeration, column/eigenvector truncation, additive PTAS |
//! | [`hardness`] | CNF types, 3SAT→2SAT gadget, the literal-matrix reduction chain |
//! | [`expansion`] | 1-regular walk graphs, expansion profiles, lazy powering |
//! | [`shortcode`] | Reed–Muller Cayley graph and its SDP gap instance |
//! | [`verify`] | named inequality suites used by the CLI |

pub mod combinatorics;
pub mod error;
pub mod expansion;
pub mod hardness;
pub mod instances;
pub mod linalg;
pub mod rng;
pub mod shortcode;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{SpectralDecomp, SymMatrix};
pub use solvers::SparseSolution;

/// Environment variable that overrides the exact-enumeration budget.
pub const BUDGET_ENV: &str = "SPCA_BUDGET";

/// Enumeration guards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Limit on `C(n, k)·k³` for exact support enumeration.
    pub exact_ops: f64,
    /// Limit on the number of ε-net directions (or random samples).
    pub net_points: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            exact_ops: 1e9,
            net_points: 10_000_000,
        }
    }
}

impl Budget {
    /// Defaults, with `exact_ops` taken from `SPCA_BUDGET` when it parses.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(v) = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if v > 0.0 {
                b.exact_ops = v;
            }
        }
        b
    }

    pub fn unlimited() -> Self {
        Self {
            exact_ops: f64::INFINITY,
            net_points: u64::MAX,
        }
    }
}

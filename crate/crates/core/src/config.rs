//! Numerical tolerances and solver budgets, kept in one place.

use serde::{Deserialize, Serialize};

/// Every tolerance used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Primal feasibility of LP solutions, relative to `1 + ‖rhs‖∞`.
    pub primal_feas: f64,
    /// Residual target `|φ(μ) − 1|` for the secular equation.
    pub secular: f64,
    /// Relative zero test for hyperplane evaluations.
    pub zero_rel: f64,
    /// Relative gap below which two eigenvalues are treated as one.
    pub eig_group_rel: f64,
    /// Relative pivot threshold for rank decisions.
    pub rank_rel: f64,
    /// Smallest LP value `v(λ)` accepted as strictly positive.
    pub attain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            primal_feas: 1e-9,
            secular: 1e-10,
            zero_rel: 1e-9,
            eig_group_rel: 1e-8,
            rank_rel: 1e-9,
            attain: 1e-9,
        }
    }
}

/// Limits on arrangement size; estimates beyond these raise `BudgetExceeded`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Upper bound on the estimated number of cells visited.
    pub max_cells: f64,
    /// Largest ambient dimension accepted by the arrangement module.
    pub max_dim: usize,
    /// Largest `n` accepted by brute-force subset enumeration.
    pub brute_subset_n: usize,
    /// Largest `n` accepted by brute-force assignment enumeration.
    pub brute_assign_n: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_cells: 1e8,
            max_dim: 8,
            brute_subset_n: 12,
            brute_assign_n: 6,
        }
    }
}

/// Full solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: Tolerances,
    pub budget: Budget,
    /// Worker threads; `0` means one per available core.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            budget: Budget::default(),
            threads: 1,
        }
    }
}

impl SolverConfig {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Runs `f` inside a rayon pool sized by `threads`.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

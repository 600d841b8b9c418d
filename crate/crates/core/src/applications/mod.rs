//! Sparse PCA family and friends, wired into the framework.

mod disjoint;
mod matroid;
mod spca;
mod trs;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use disjoint::{disjoint_spca_solve, disjoint_value, DisjointAssignment};
pub use matroid::{matroid_convex_solve, MatroidSupportOracle};
pub use spca::{
    nn_spca_oracle, nn_spca_solve, spca_multi_oracle, spca_multi_solve, spca_single_oracle,
    spca_single_solve, MultiOracle, NnOracle, SingleOracle,
};
pub use trs::{custom_quadratic_solve, tst_oracle, tst_solve, QuadraticSphereOracle};

use crate::comonotone::MatroidSpec;
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::framework::{Objective, Outcome, ProjectedObjective, RANK_TOL};
use crate::numerics::{sym_eig, Matrix, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    SingleSpca,
    NnSpca,
    #[serde(rename = "2st")]
    Tst,
    Spca,
    DisjointSpca,
    MatroidConvex,
    CustomQuadratic,
}

impl Problem {
    pub const ALL: [Problem; 7] = [
        Problem::SingleSpca,
        Problem::NnSpca,
        Problem::Tst,
        Problem::Spca,
        Problem::DisjointSpca,
        Problem::MatroidConvex,
        Problem::CustomQuadratic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::SingleSpca => "single-spca",
            Problem::NnSpca => "nn-spca",
            Problem::Tst => "2st",
            Problem::Spca => "spca",
            Problem::DisjointSpca => "disjoint-spca",
            Problem::MatroidConvex => "matroid-convex",
            Problem::CustomQuadratic => "custom-quadratic",
        }
    }

    /// Whether the problem reads the component count `d`.
    pub fn uses_components(self) -> bool {
        matches!(self, Problem::Spca | Problem::DisjointSpca)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = ComaxError;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| ComaxError::InvalidInput(format!("unknown problem {s:?}")))
    }
}

/// Problem data as read from an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    /// Factor `A` (`r × n`), rows as lists.
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    /// Covariance `Σ`, factored on load when `A` is absent.
    #[serde(rename = "Sigma", default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Vec<f64>>>,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_vec: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_lin: Option<Vec<f64>>,
    /// Quadratic form of `f(y) = yᵀQy + bᵀy`.
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matroid: Option<MatroidSpec>,
}

impl Instance {
    pub fn from_factor(a: &Matrix, s: usize) -> Self {
        Self {
            a: Some(a.to_rows()),
            sigma: None,
            s,
            d: None,
            s_vec: None,
            a_lin: None,
            q: None,
            b: None,
            matroid: None,
        }
    }

    /// The factor `A`, from `A` or by factoring `Σ`.
    pub fn factor(&self, rank_tol: f64) -> Result<Matrix> {
        match (&self.a, &self.sigma) {
            (Some(a), _) => Matrix::from_rows(a),
            (None, Some(s)) => factor_covariance(&SymMatrix::new(s)?, rank_tol),
            (None, None) => Err(ComaxError::InvalidInput(
                "instance has neither A nor Sigma".into(),
            )),
        }
    }

    pub fn n(&self) -> Result<usize> {
        Ok(self.factor(RANK_TOL)?.cols())
    }

    pub fn components(&self) -> usize {
        self.d.unwrap_or(1)
    }

    /// Checks the fields a problem needs.
    pub fn validate(&self, problem: Problem) -> Result<()> {
        let a = self.factor(RANK_TOL)?;
        let (r, n) = (a.rows(), a.cols());
        if self.s == 0 || self.s > n {
            return Err(ComaxError::InvalidInput(format!(
                "s = {} outside 1..={n}",
                self.s
            )));
        }
        if self.d.is_some() && !problem.uses_components() {
            return Err(ComaxError::InvalidInput(format!(
                "{problem} takes no component count d"
            )));
        }
        if self.d == Some(0) {
            return Err(ComaxError::InvalidInput("d must be at least 1".into()));
        }
        match problem {
            Problem::Tst => {
                let lin = self
                    .a_lin
                    .as_ref()
                    .ok_or_else(|| missing("a_lin", problem))?;
                if lin.len() != n {
                    return Err(ComaxError::WrongDimension {
                        expected: n,
                        found: lin.len(),
                    });
                }
            }
            Problem::DisjointSpca => {
                let caps = self
                    .s_vec
                    .as_ref()
                    .ok_or_else(|| missing("s_vec", problem))?;
                if caps.len() != self.components() || caps.iter().any(|&c| c == 0) {
                    return Err(ComaxError::InvalidInput(
                        "s_vec needs d entries, each at least 1".into(),
                    ));
                }
            }
            Problem::MatroidConvex | Problem::CustomQuadratic => {
                let q = self.q.as_ref().ok_or_else(|| missing("Q", problem))?;
                let b = self.b.as_ref().ok_or_else(|| missing("b", problem))?;
                if q.len() != r || b.len() != r {
                    return Err(ComaxError::WrongDimension {
                        expected: r,
                        found: b.len(),
                    });
                }
                if problem == Problem::MatroidConvex {
                    let m = self
                        .matroid
                        .as_ref()
                        .ok_or_else(|| missing("matroid", problem))?;
                    if m.build()?.ground_size() != n {
                        return Err(ComaxError::InvalidInput(
                            "matroid ground set differs from n".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn missing(field: &str, problem: Problem) -> ComaxError {
    ComaxError::InvalidInput(format!("{problem} needs field {field:?}"))
}

/// `Σ = AᵀA`.
pub fn covariance(a: &Matrix) -> SymMatrix {
    a.gram()
}

/// A factor `A` with `AᵀA = Σ` and one row per eigenvalue above
/// `rank_tol · λ_max`.
pub fn factor_covariance(sigma: &SymMatrix, rank_tol: f64) -> Result<Matrix> {
    let eig = sym_eig(sigma)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > rank_tol * top && eig.values[k] > 0.0)
        .collect();
    if keep.is_empty() {
        return Err(ComaxError::InvalidInput("covariance is zero".into()));
    }
    Ok(Matrix::from_fn(keep.len(), sigma.order(), |i, j| {
        let k = keep[i];
        eig.values[k].sqrt() * eig.vectors[k][j]
    }))
}

/// Drops redundant rows of `A`: returns `UᵀA` with orthonormal `U` spanning
/// the row space, and `f` composed with `U`. Full-rank factors pass through.
pub fn compress(a: &Matrix, f: Arc<dyn Objective>) -> Result<(Matrix, Arc<dyn Objective>)> {
    let rank = a.rank(RANK_TOL);
    if rank == a.rows() {
        return Ok((a.clone(), f));
    }
    if rank == 0 {
        return Err(ComaxError::InvalidInput("factor matrix is zero".into()));
    }
    let g = SymMatrix::from_fn(a.rows(), |i, j| crate::numerics::dot(a.row(i), a.row(j)));
    let eig = sym_eig(&g)?;
    let keep: Vec<usize> = (0..rank).collect();
    let u = Matrix::from_fn(a.rows(), keep.len(), |i, k| eig.vectors[keep[k]][i]);
    let reduced = Matrix::from_fn(keep.len(), a.cols(), |k, j| {
        (0..a.rows()).map(|i| u.get(i, k) * a.get(i, j)).sum()
    });
    Ok((reduced, Arc::new(ProjectedObjective { inner: f, u })))
}

/// Convex quadratic `(Q, b)` of an instance.
pub fn instance_quadratic(inst: &Instance) -> Result<(SymMatrix, Vec<f64>)> {
    let q = inst
        .q
        .as_ref()
        .ok_or_else(|| ComaxError::InvalidInput("missing Q".into()))?;
    let b = inst
        .b
        .clone()
        .ok_or_else(|| ComaxError::InvalidInput("missing b".into()))?;
    Ok((SymMatrix::new(q)?, b))
}

/// Solves `problem` on `inst` through the framework.
pub fn solve_problem(problem: Problem, inst: &Instance, cfg: &SolverConfig) -> Result<Outcome> {
    inst.validate(problem)?;
    let a = inst.factor(cfg.tol.rank_rel)?;
    let s = inst.s;
    match problem {
        Problem::SingleSpca => spca_single_solve(&a, s, cfg),
        Problem::NnSpca => nn_spca_solve(&a, s, cfg),
        Problem::Tst => tst_solve(&a, inst.a_lin.as_deref().unwrap_or(&[]), s, cfg),
        Problem::Spca => spca_multi_solve(&a, s, inst.components(), cfg),
        Problem::DisjointSpca => disjoint_spca_solve(
            &a,
            inst.components(),
            inst.s_vec.as_deref().unwrap_or(&[]),
            cfg,
        ),
        Problem::MatroidConvex => {
            let (q, b) = instance_quadratic(inst)?;
            let m = inst.matroid.as_ref().expect("validated").build()?;
            matroid_convex_solve(&a, q, b, m, cfg)
        }
        Problem::CustomQuadratic => {
            let (q, b) = instance_quadratic(inst)?;
            custom_quadratic_solve(&a, q, b, s, cfg)
        }
    }
}

#[cfg(test)]
mod tests;

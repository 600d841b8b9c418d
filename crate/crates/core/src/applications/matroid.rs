//! Convex quadratic maximization over matroid incidence vectors.

use std::sync::Arc;

use crate::comonotone::{greedy_max_linear, matroid_psi, MatroidKind, MatroidOracle};
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::framework::{
    solve, ConvexQuadratic, Objective, OracleOutcome, Outcome, ProblemSpec, Regime, Solution,
    SupportCandidate, SupportOracle,
};
use crate::numerics::{Matrix, SymMatrix};

/// Scores `1_S` when `S` is feasible in the matroid.
pub struct MatroidSupportOracle {
    pub a: Matrix,
    pub objective: Arc<dyn Objective>,
    pub matroid: Arc<dyn MatroidOracle>,
    pub rank: usize,
}

impl MatroidSupportOracle {
    pub fn new(a: Matrix, objective: Arc<dyn Objective>, matroid: Arc<dyn MatroidOracle>) -> Self {
        let rank = greedy_max_linear(matroid.as_ref(), &vec![1.0; matroid.ground_size()]).len();
        Self {
            a,
            objective,
            matroid,
            rank,
        }
    }

    pub fn feasible(&self, set: &[usize]) -> bool {
        self.matroid.is_independent(set)
            && (self.matroid.kind() == MatroidKind::IndependentSets || set.len() == self.rank)
    }
}

impl SupportOracle for MatroidSupportOracle {
    fn evaluate(&self, c: &SupportCandidate) -> Result<OracleOutcome> {
        if !self.feasible(&c.indices) {
            return Ok(OracleOutcome::NotAttained { fallback: None });
        }
        let mut x = vec![0.0; self.a.cols()];
        for &i in &c.indices {
            x[i] = 1.0;
        }
        let value = self.objective.value(&self.a.mul_vec(&x));
        Ok(OracleOutcome::Attained(
            Solution::new(x, value).with_support(c.indices.clone()),
        ))
    }
}

/// `max yᵀQy + bᵀy` at `y = Ax` over incidence vectors of independent sets
/// or bases of `matroid`.
pub fn matroid_convex_solve(
    a: &Matrix,
    q: SymMatrix,
    b: Vec<f64>,
    matroid: Arc<dyn MatroidOracle>,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    if matroid.ground_size() != a.cols() {
        return Err(ComaxError::WrongDimension {
            expected: a.cols(),
            found: matroid.ground_size(),
        });
    }
    let f: Arc<dyn Objective> = Arc::new(ConvexQuadratic::new(q, b)?);
    let psi = Arc::new(matroid_psi(matroid.clone())?);
    let oracle = Arc::new(MatroidSupportOracle::new(a.clone(), f.clone(), matroid));
    let (fa, fobj) = super::compress(a, f)?;
    let spec = ProblemSpec::new(fa, fobj, Regime::GeneralComonotone(psi), oracle)?;
    solve(&spec, cfg)
}

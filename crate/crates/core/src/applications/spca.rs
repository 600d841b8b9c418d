//! Single, nonnegative and multi-component sparse PCA.

use std::sync::Arc;

use super::compress;
use crate::config::{SolverConfig, Tolerances};
use crate::error::{ComaxError, Result};
use crate::framework::{
    solve, svec, svec_len, KyFanObjective, OracleOutcome, Outcome, ProblemSpec, Regime, Solution,
    SquaredNorm, SupportCandidate, SupportOracle,
};
use crate::numerics::{
    leading_eigenpair, solve_lp, sym_eig, LpProblem, LpStatus, Matrix, Relation, SymMatrix,
};

fn check_cap(support: &[usize], cap: usize) -> Result<()> {
    if support.len() > cap {
        return Err(ComaxError::InfeasibleSupport {
            size: support.len(),
            cap,
        });
    }
    Ok(())
}

fn embed(n: usize, support: &[usize], v: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (&i, &vi) in support.iter().zip(v) {
        x[i] = vi;
    }
    x
}

/// `λ_max(Σ_SS)` with its leading unit eigenvector placed on `S`.
pub fn spca_single_oracle(sigma: &SymMatrix, cap: usize, support: &[usize]) -> Result<Solution> {
    check_cap(support, cap)?;
    if support.is_empty() {
        return Err(ComaxError::InvalidInput("empty support".into()));
    }
    let (value, v) = leading_eigenpair(&sigma.principal(support))?;
    Ok(Solution::new(embed(sigma.order(), support, &v), value).with_support(support.to_vec()))
}

pub struct SingleOracle {
    pub sigma: SymMatrix,
    pub cap: usize,
}

impl SupportOracle for SingleOracle {
    fn evaluate(&self, c: &SupportCandidate) -> Result<OracleOutcome> {
        if c.indices.is_empty() {
            return Ok(OracleOutcome::NotAttained { fallback: None });
        }
        spca_single_oracle(&self.sigma, self.cap, &c.indices).map(OracleOutcome::Attained)
    }
}

/// `max xᵀΣx` over unit vectors with at most `s` nonzeros.
pub fn spca_single_solve(a: &Matrix, s: usize, cfg: &SolverConfig) -> Result<Outcome> {
    let sigma = a.gram();
    let (f, obj) = compress(a, Arc::new(SquaredNorm { rank: a.rows() }))?;
    let oracle = Arc::new(SingleOracle { sigma, cap: s });
    let spec = ProblemSpec::new(f, obj, Regime::SignInvStandard, oracle)?.with_cap(s)?;
    solve(&spec, cfg)
}

/// Largest eigenvalue of `Σ_SS` owning a strictly positive eigenvector,
/// found by one LP per eigenspace:
/// `max t  s.t.  Uβ ≥ t·1, −1 ≤ β ≤ 1, t ≤ 1`.
/// Without one, reports non-attainment with the first coordinate vector of
/// `S` as a feasible fallback.
pub fn nn_spca_oracle(
    sigma: &SymMatrix,
    cap: usize,
    support: &[usize],
    tol: &Tolerances,
) -> Result<OracleOutcome> {
    check_cap(support, cap)?;
    let n = sigma.order();
    let Some(&first) = support.first() else {
        return Ok(OracleOutcome::NotAttained { fallback: None });
    };
    let sub = sigma.principal(support);
    let eig = sym_eig(&sub)?;
    let m = support.len();
    for group in eig.groups(tol.eig_group_rel) {
        let k = group.len();
        let mut lp = LpProblem::new({
            let mut c = vec![0.0; k];
            c.push(1.0);
            c
        });
        for l in 0..k {
            lp = lp.bounds(l, Some(-1.0), Some(1.0));
        }
        lp = lp.bounds(k, None, Some(1.0));
        for i in 0..m {
            let mut row: Vec<f64> = group.iter().map(|&g| eig.vectors[g][i]).collect();
            row.push(-1.0);
            lp.push_row(row, Relation::Ge, 0.0);
        }
        let res = solve_lp(&lp)?;
        if res.status != LpStatus::Optimal || res.value <= tol.attain {
            continue;
        }
        let mut v: Vec<f64> = (0..m)
            .map(|i| {
                group
                    .iter()
                    .zip(&res.x)
                    .map(|(&g, b)| b * eig.vectors[g][i])
                    .sum()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        if v.iter().any(|&x| x <= 0.0) {
            continue;
        }
        let value = sub.quad_form(&v);
        return Ok(OracleOutcome::Attained(
            Solution::new(embed(n, support, &v), value).with_support(support.to_vec()),
        ));
    }
    let mut x = vec![0.0; n];
    x[first] = 1.0;
    Ok(OracleOutcome::NotAttained {
        fallback: Some(Solution::new(x, sigma.get(first, first))),
    })
}

pub struct NnOracle {
    pub sigma: SymMatrix,
    pub cap: usize,
    pub tol: Tolerances,
}

impl SupportOracle for NnOracle {
    fn evaluate(&self, c: &SupportCandidate) -> Result<OracleOutcome> {
        nn_spca_oracle(&self.sigma, self.cap, &c.indices, &self.tol)
    }
}

/// `max xᵀΣx` over nonnegative unit vectors with at most `s` nonzeros.
pub fn nn_spca_solve(a: &Matrix, s: usize, cfg: &SolverConfig) -> Result<Outcome> {
    let sigma = a.gram();
    let (f, obj) = compress(a, Arc::new(SquaredNorm { rank: a.rows() }))?;
    let oracle = Arc::new(NnOracle {
        sigma,
        cap: s,
        tol: cfg.tol,
    });
    let spec = ProblemSpec::new(f, obj, Regime::NonnegStandard, oracle)?.with_cap(s)?;
    solve(&spec, cfg)
}

/// `‖Σ_{i∈S} a_i a_iᵀ‖₍d₎` at the binary point `1_S`.
pub fn spca_multi_oracle(a: &Matrix, d: usize, cap: usize, support: &[usize]) -> Result<Solution> {
    check_cap(support, cap)?;
    let r = a.rows();
    let m = SymMatrix::from_fn(r, |p, q| {
        support.iter().map(|&i| a.get(p, i) * a.get(q, i)).sum()
    });
    let value = if support.is_empty() {
        0.0
    } else {
        sym_eig(&m)?.top_sum(d)
    };
    let mut x = vec![0.0; a.cols()];
    for &i in support {
        x[i] = 1.0;
    }
    Ok(Solution::new(x, value).with_support(support.to_vec()))
}

pub struct MultiOracle {
    pub a: Matrix,
    pub d: usize,
    pub cap: usize,
}

impl SupportOracle for MultiOracle {
    fn evaluate(&self, c: &SupportCandidate) -> Result<OracleOutcome> {
        spca_multi_oracle(&self.a, self.d, self.cap, &c.indices).map(OracleOutcome::Attained)
    }
}

/// Column `i` is `svec(a_i a_iᵀ)`.
pub(crate) fn lifted_factor(a: &Matrix) -> Matrix {
    let r = a.rows();
    let cols: Vec<Vec<f64>> = (0..a.cols())
        .map(|i| {
            let c = a.column(i);
            svec(&SymMatrix::from_fn(r, |p, q| c[p] * c[q]))
        })
        .collect();
    Matrix::from_fn(svec_len(r), a.cols(), |k, i| cols[i][k])
}

/// `max ‖Σ_i x_i a_i a_iᵀ‖₍d₎` over binary `x` with `Σx ≤ s`.
pub fn spca_multi_solve(a: &Matrix, s: usize, d: usize, cfg: &SolverConfig) -> Result<Outcome> {
    let r = a.rows();
    if d == 0 || d > r {
        return Err(ComaxError::PreconditionUnmet(format!(
            "component count d = {d} must lie in 1..={r}"
        )));
    }
    let (f, obj) = compress(&lifted_factor(a), Arc::new(KyFanObjective { order: r, d }))?;
    let oracle = Arc::new(MultiOracle {
        a: a.clone(),
        d,
        cap: s,
    });
    let spec = ProblemSpec::new(f, obj, Regime::NonnegStandard, oracle)?.with_cap(s)?;
    solve(&spec, cfg)
}

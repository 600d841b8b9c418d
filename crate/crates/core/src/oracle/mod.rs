//! Brute-force reference solvers and seeded instance generators.
//!
//! Nothing here touches the framework's candidate generation: supports and
//! assignments are enumerated exhaustively and scored with the fixed-support
//! routines.

mod generate;

pub use generate::{adversarial_tie_instance, snap, Distribution, InstanceSeed};

use rayon::prelude::*;

use crate::applications::{
    disjoint_value, instance_quadratic, nn_spca_oracle, spca_multi_oracle, spca_single_oracle,
    tst_oracle, DisjointAssignment, Instance, Problem,
};
use crate::comonotone::enumerate_feasible;
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::framework::{keep_best, OracleOutcome, Solution};
use crate::numerics::{dot, Matrix, SymMatrix};

/// Nonempty subsets of `0..n` with at most `cap` elements, by bitmask.
pub fn capped_subsets(n: usize, cap: usize) -> Vec<Vec<usize>> {
    (1..1u64 << n)
        .filter(|m| m.count_ones() as usize <= cap)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn budget_check(what: &str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(ComaxError::BudgetExceeded {
            what: format!("brute-force {what} (n)"),
            estimate: n as f64,
            limit: limit as f64,
        });
    }
    Ok(())
}

/// Scores every item in parallel and keeps the best in input order.
fn best_of<T: Sync>(
    items: &[T],
    cfg: &SolverConfig,
    score: impl Fn(&T) -> Result<Option<Solution>> + Sync,
) -> Result<Solution> {
    let scored: Vec<Result<Option<Solution>>> =
        cfg.install(|| items.par_iter().map(&score).collect());
    let mut best = None;
    for s in scored {
        if let Some(s) = s? {
            keep_best(&mut best, s);
        }
    }
    best.ok_or(ComaxError::NoAttainedOptimum)
}

fn incidence(n: usize, set: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for &i in set {
        x[i] = 1.0;
    }
    x
}

/// Exact optimum of `problem` on `inst` by exhaustive enumeration.
pub fn brute_force_solve(
    problem: Problem,
    inst: &Instance,
    cfg: &SolverConfig,
) -> Result<Solution> {
    inst.validate(problem)?;
    let a = inst.factor(cfg.tol.rank_rel)?;
    let n = a.cols();
    let s = inst.s;
    if problem == Problem::DisjointSpca {
        budget_check("assignment enumeration", n, cfg.budget.brute_assign_n)?;
        let d = inst.components();
        let caps = inst.s_vec.clone().unwrap_or_default();
        return brute_disjoint(&a, d, &caps, cfg);
    }
    budget_check("subset enumeration", n, cfg.budget.brute_subset_n)?;
    match problem {
        Problem::SingleSpca => {
            let sigma = a.gram();
            best_of(&capped_subsets(n, s), cfg, |sub| {
                spca_single_oracle(&sigma, s, sub).map(Some)
            })
        }
        Problem::NnSpca => {
            let sigma = a.gram();
            best_of(&capped_subsets(n, s), cfg, |sub| {
                Ok(match nn_spca_oracle(&sigma, s, sub, &cfg.tol)? {
                    OracleOutcome::Attained(x) => Some(x),
                    OracleOutcome::NotAttained { .. } => None,
                })
            })
        }
        Problem::Tst => {
            let sigma = a.gram();
            let lin = inst.a_lin.clone().unwrap_or_default();
            best_of(&capped_subsets(n, s), cfg, |sub| {
                tst_oracle(&sigma, &lin, s, sub, cfg.tol.secular).map(Some)
            })
        }
        Problem::Spca => {
            let d = inst.components();
            if d > a.rows() {
                return Err(ComaxError::PreconditionUnmet(format!(
                    "component count d = {d} exceeds rank {}",
                    a.rows()
                )));
            }
            best_of(&capped_subsets(n, s), cfg, |sub| {
                spca_multi_oracle(&a, d, s, sub).map(Some)
            })
        }
        Problem::CustomQuadratic => {
            let (q, b) = instance_quadratic(inst)?;
            let qa: Vec<Vec<f64>> = (0..n).map(|j| q.mul_vec(&a.column(j))).collect();
            let sigma = SymMatrix::from_fn(n, |i, j| dot(&a.column(i), &qa[j]));
            let lin = a.tr_mul_vec(&b);
            best_of(&capped_subsets(n, s), cfg, |sub| {
                tst_oracle(&sigma, &lin, s, sub, cfg.tol.secular).map(Some)
            })
        }
        Problem::MatroidConvex => {
            let (q, b) = instance_quadratic(inst)?;
            let m = inst.matroid.as_ref().expect("validated").build()?;
            let sets = enumerate_feasible(m.as_ref());
            best_of(&sets, cfg, |set| {
                let x = incidence(n, set);
                let y = a.mul_vec(&x);
                Ok(Some(
                    Solution::new(x, q.quad_form(&y) + dot(&b, &y)).with_support(set.clone()),
                ))
            })
        }
        Problem::DisjointSpca => unreachable!(),
    }
}

fn brute_disjoint(a: &Matrix, d: usize, caps: &[usize], cfg: &SolverConfig) -> Result<Solution> {
    let n = a.cols();
    let codes: Vec<usize> = (0..(d + 1).pow(n as u32)).collect();
    best_of(&codes, cfg, |&code| {
        let labels: Vec<usize> = (0..n)
            .map(|i| code / (d + 1).pow(i as u32) % (d + 1))
            .collect();
        let z = DisjointAssignment::new(d, labels)?;
        if !z.respects(caps) {
            return Ok(None);
        }
        let value = disjoint_value(a, &z)?;
        let x = z
            .labels
            .iter()
            .map(|&l| if l < d { 1.0 } else { 0.0 })
            .collect();
        let mut sol = Solution::new(x, value);
        sol.assignment = Some(z.labels);
        Ok(Some(sol))
    })
}

//! Sphere-constrained quadratics: 2ST and user-supplied convex quadratics.

use std::sync::Arc;

use super::compress;
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::framework::{
    solve, ConvexQuadratic, Objective, OracleOutcome, Outcome, ProblemSpec, Regime, Solution,
    SupportCandidate, SupportOracle, TstObjective,
};
use crate::numerics::{dot, secular_root, sym_eig, Matrix, SymMatrix};

/// `max xᵀΣ_SSx + bᵀx` over unit vectors supported on `S`, by the secular
/// equation on the eigenbasis of `Σ_SS`. In the hard case the multiplier is
/// `λ_max` and the missing norm goes to the top eigenvector.
pub fn tst_oracle(
    sigma: &SymMatrix,
    lin: &[f64],
    cap: usize,
    support: &[usize],
    tol: f64,
) -> Result<Solution> {
    if support.len() > cap {
        return Err(ComaxError::InfeasibleSupport {
            size: support.len(),
            cap,
        });
    }
    if support.is_empty() {
        return Err(ComaxError::InvalidInput("empty support".into()));
    }
    let sub = sigma.principal(support);
    let b: Vec<f64> = support.iter().map(|&i| lin[i]).collect();
    let eig = sym_eig(&sub)?;
    let m = support.len();
    let bt: Vec<f64> = eig.vectors.iter().map(|v| dot(v, &b)).collect();
    let coeffs: Vec<f64> = match secular_root(&eig.values, &bt, tol) {
        Ok(mu) => eig
            .values
            .iter()
            .zip(&bt)
            .map(|(l, bk)| {
                if *bk == 0.0 {
                    0.0
                } else {
                    (bk / 2.0) / (mu - l)
                }
            })
            .collect(),
        Err(ComaxError::HardCase) => {
            let l1 = eig.values[0];
            let scale = eig.values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
            let mut c: Vec<f64> = eig
                .values
                .iter()
                .zip(&bt)
                .map(|(l, bk)| {
                    if l1 - l <= 1e-12 * scale {
                        0.0
                    } else {
                        (bk / 2.0) / (l1 - l)
                    }
                })
                .collect();
            let rest: f64 = c.iter().map(|v| v * v).sum();
            c[0] = (1.0 - rest).max(0.0).sqrt();
            c
        }
        Err(e) => return Err(e),
    };
    let mut v: Vec<f64> = (0..m)
        .map(|i| coeffs.iter().zip(&eig.vectors).map(|(c, u)| c * u[i]).sum())
        .collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let value = sub.quad_form(&v) + dot(&b, &v);
    let mut x = vec![0.0; sigma.order()];
    for (&i, &vi) in support.iter().zip(&v) {
        x[i] = vi;
    }
    Ok(Solution::new(x, value).with_support(support.to_vec()))
}

/// Fixed-support oracle for `max xᵀΣx + lᵀx` on the sparse unit sphere.
pub struct QuadraticSphereOracle {
    pub sigma: SymMatrix,
    pub lin: Vec<f64>,
    pub cap: usize,
    pub tol: f64,
}

impl SupportOracle for QuadraticSphereOracle {
    fn evaluate(&self, c: &SupportCandidate) -> Result<OracleOutcome> {
        if c.indices.is_empty() {
            return Ok(OracleOutcome::NotAttained { fallback: None });
        }
        tst_oracle(&self.sigma, &self.lin, self.cap, &c.indices, self.tol)
            .map(OracleOutcome::Attained)
    }
}

fn sphere_solve(
    f: Matrix,
    obj: Arc<dyn Objective>,
    oracle: QuadraticSphereOracle,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let s = oracle.cap;
    let (f, obj) = compress(&f, obj)?;
    let spec = ProblemSpec::new(f, obj, Regime::Standard, Arc::new(oracle))?.with_cap(s)?;
    solve(&spec, cfg)
}

/// `max ‖Ax‖² + aᵀx` over unit vectors with at most `s` nonzeros, through
/// the augmented factor `[A; aᵀ]`.
pub fn tst_solve(a: &Matrix, a_lin: &[f64], s: usize, cfg: &SolverConfig) -> Result<Outcome> {
    let (r, n) = (a.rows(), a.cols());
    if a_lin.len() != n {
        return Err(ComaxError::WrongDimension {
            expected: n,
            found: a_lin.len(),
        });
    }
    let aug = Matrix::from_fn(r + 1, n, |i, j| if i < r { a.get(i, j) } else { a_lin[j] });
    let oracle = QuadraticSphereOracle {
        sigma: a.gram(),
        lin: a_lin.to_vec(),
        cap: s,
        tol: cfg.tol.secular,
    };
    sphere_solve(aug, Arc::new(TstObjective { r }), oracle, cfg)
}

/// `max f(Ax)` with `f(y) = yᵀQy + bᵀy` over the sparse unit sphere.
pub fn custom_quadratic_solve(
    a: &Matrix,
    q: SymMatrix,
    b: Vec<f64>,
    s: usize,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let n = a.cols();
    let f = ConvexQuadratic::new(q, b)?;
    let qa: Vec<Vec<f64>> = (0..n).map(|j| f.q().mul_vec(&a.column(j))).collect();
    let sigma = SymMatrix::from_fn(n, |i, j| dot(&a.column(i), &qa[j]));
    let oracle = QuadraticSphereOracle {
        sigma,
        lin: a.tr_mul_vec(f.b()),
        cap: s,
        tol: cfg.tol.secular,
    };
    sphere_solve(a.clone(), Arc::new(f), oracle, cfg)
}

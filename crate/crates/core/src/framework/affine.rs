//! Binary feasible sets cut by `Mx ≤ b`, through the `(c, λ, γ)` arrangement.

use super::cells::FormSpace;
use super::generate::{ThresholdKind, ThresholdSet};
use super::{ProblemSpec, Provenance, Regime, Solution};
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::numerics::{solve_lp, LpProblem, LpStatus, Matrix, Relation};

/// Returns the minimizer and maximizer of `eᵀx` over the points of the
/// feasible set compatible with a threshold set, or `None` if there are none.
pub trait RepresentativeOracle: Send + Sync {
    fn extremes(&self, t: &ThresholdSet) -> Result<Option<(Vec<f64>, Vec<f64>)>>;
}

/// `{x ∈ {0,1}ⁿ : Mx ≤ b}` with an integral relaxation, so LP vertices are
/// binary.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPolytope {
    pub m: Matrix,
    pub b: Vec<f64>,
}

impl BinaryPolytope {
    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        match spec.regime() {
            Regime::AffineRestricted { m, b } => Ok(Self {
                m: m.clone(),
                b: b.clone(),
            }),
            _ => Err(ComaxError::InvalidInput(
                "not an affine-restricted problem".into(),
            )),
        }
    }

    fn extreme(&self, t: &ThresholdSet, sense: f64) -> Result<Option<Vec<f64>>> {
        let n = self.m.cols();
        let free = &t.tie_upper;
        let mut x = vec![0.0; n];
        for &i in &t.positive {
            x[i] = 1.0;
        }
        let mut lp = LpProblem::new(vec![sense; free.len()]);
        for k in 0..free.len() {
            lp = lp.bounds(k, Some(0.0), Some(1.0));
        }
        for j in 0..self.m.rows() {
            let row = self.m.row(j);
            let rhs = self.b[j] - t.positive.iter().map(|&i| row[i]).sum::<f64>();
            let rel = if t.tight.contains(&j) {
                Relation::Eq
            } else {
                Relation::Le
            };
            lp.push_row(free.iter().map(|&i| row[i]).collect(), rel, rhs);
        }
        if free.is_empty() {
            let ok = lp.rows.iter().all(|r| match r.rel {
                Relation::Eq => r.rhs.abs() <= 1e-9,
                _ => r.rhs >= -1e-9,
            });
            return Ok(ok.then_some(x));
        }
        let res = solve_lp(&lp)?;
        if res.status != LpStatus::Optimal {
            return Ok(None);
        }
        for (k, &i) in free.iter().enumerate() {
            let v = res.x[k].round();
            if (res.x[k] - v).abs() > 1e-6 {
                return Err(ComaxError::OracleContractViolation(
                    "relaxation has a fractional vertex".into(),
                ));
            }
            x[i] = v;
        }
        Ok(Some(x))
    }
}

impl RepresentativeOracle for BinaryPolytope {
    fn extremes(&self, t: &ThresholdSet) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        let lo = self.extreme(t, -1.0)?;
        let hi = self.extreme(t, 1.0)?;
        Ok(lo.zip(hi))
    }
}

/// Representatives per cell with their provenance, and the cell count.
pub(crate) fn representatives(
    spec: &ProblemSpec,
    oracle: &dyn RepresentativeOracle,
    cfg: &SolverConfig,
) -> Result<(Vec<(Vec<f64>, Provenance)>, usize)> {
    let Regime::AffineRestricted { m, .. } = spec.regime() else {
        return Err(ComaxError::InvalidInput(
            "not an affine-restricted problem".into(),
        ));
    };
    let (r, n, rows) = (spec.rank(), spec.n(), m.rows());
    let q = r + 1 + rows;
    let mut forms = Vec::with_capacity(n + rows);
    for i in 0..n {
        let mut f = spec.a().column(i);
        f.push(-1.0);
        f.extend((0..rows).map(|j| -m.get(j, i)));
        forms.push(f);
    }
    for j in 0..rows {
        let mut e = vec![0.0; q];
        e[r + 1 + j] = 1.0;
        forms.push(e);
    }
    let space = FormSpace {
        forms: &forms,
        q,
        c_dims: r,
        anchor: spec.anchor(),
    };
    let cells = space.cells(rows + 2, cfg)?;
    let mut out = Vec::new();
    for (cell, s) in cells.iter().enumerate() {
        if s[n..].iter().any(|&g| g < 0) {
            continue;
        }
        let mut t = ThresholdSet {
            kind: ThresholdKind::Affine,
            positive: Vec::new(),
            zero: Vec::new(),
            negative: Vec::new(),
            tie_upper: Vec::new(),
            tie_lower: Vec::new(),
            merged: false,
            signs: vec![1; n],
            tight: (0..rows).filter(|&j| s[n + j] > 0).collect(),
        };
        for (i, &si) in s[..n].iter().enumerate() {
            match si {
                1 => t.positive.push(i),
                0 => t.tie_upper.push(i),
                _ => t.zero.push(i),
            }
        }
        if let Some((lo, hi)) = oracle.extremes(&t)? {
            let (a, b): (f64, f64) = (lo.iter().sum(), hi.iter().sum());
            if a > b + 1e-9 {
                return Err(ComaxError::OracleContractViolation(format!(
                    "minimum {a} of eᵀx exceeds maximum {b}"
                )));
            }
            let size = t.positive.len() + t.tie_upper.len();
            out.push((
                lo,
                Provenance {
                    cell,
                    t1: a as usize,
                    t2: size,
                },
            ));
            out.push((
                hi,
                Provenance {
                    cell,
                    t1: b as usize,
                    t2: size,
                },
            ));
        }
    }
    Ok((out, cells.len()))
}

/// Candidate points of the affine-restricted problem: per cell, a minimizer
/// and a maximizer of `eᵀx`, each valued by `f(Ax)`. Duplicates removed.
pub fn affine_restricted_candidates(
    spec: &ProblemSpec,
    oracle: &dyn RepresentativeOracle,
    cfg: &SolverConfig,
) -> Result<Vec<Solution>> {
    let (reps, _) = representatives(spec, oracle, cfg)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (x, _) in reps {
        let key: Vec<bool> = x.iter().map(|v| *v > 0.5).collect();
        if seen.insert(key) {
            let value = spec.value_at(&x);
            out.push(Solution::new(x, value));
        }
    }
    Ok(out)
}

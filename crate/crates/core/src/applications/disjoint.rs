//! Disjoint-support multi-component sparse PCA.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::spca::lifted_factor;
use crate::arrangement::cell_estimate;
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::framework::cells::FormSpace;
use crate::framework::{svec_len, Outcome, Solution, SolveReport, VALUE_TIE_REL};
use crate::numerics::{assign_rows, leading_eigenpair, Matrix, SymMatrix};

/// Row `i` goes to component `labels[i]`; label `d` leaves it unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisjointAssignment {
    pub d: usize,
    pub labels: Vec<usize>,
}

impl DisjointAssignment {
    pub fn new(d: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.iter().any(|&l| l > d) {
            return Err(ComaxError::InvalidInput(
                "assignment label exceeds d".into(),
            ));
        }
        Ok(Self { d, labels })
    }

    /// The binary `n × (d+1)` matrix `Z`.
    pub fn z(&self) -> Vec<Vec<u8>> {
        self.labels
            .iter()
            .map(|&l| (0..=self.d).map(|j| u8::from(j == l)).collect())
            .collect()
    }

    /// Rows of each of the `d` components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.d];
        for (i, &l) in self.labels.iter().enumerate() {
            if l < self.d {
                out[l].push(i);
            }
        }
        out
    }

    pub fn respects(&self, caps: &[usize]) -> bool {
        self.components()
            .iter()
            .zip(caps)
            .all(|(c, &s)| c.len() <= s)
    }
}

fn component_values(a: &Matrix, z: &DisjointAssignment) -> Result<Vec<f64>> {
    let r = a.rows();
    z.components()
        .iter()
        .map(|rows| {
            if rows.is_empty() {
                return Ok(0.0);
            }
            let m = SymMatrix::from_fn(r, |p, q| {
                rows.iter().map(|&i| a.get(p, i) * a.get(q, i)).sum()
            });
            Ok(leading_eigenpair(&m)?.0)
        })
        .collect()
}

/// `Σ_j λ_max(Σ_i Z_ij a_i a_iᵀ)`.
pub fn disjoint_value(a: &Matrix, z: &DisjointAssignment) -> Result<f64> {
    Ok(component_values(a, z)?.iter().sum())
}

/// Larger total, then larger component values in order, then smaller labels.
fn disjoint_better(a: &(f64, Vec<f64>, Vec<usize>), b: &(f64, Vec<f64>, Vec<usize>)) -> bool {
    let gap = VALUE_TIE_REL * (1.0 + a.0.abs().max(b.0.abs()));
    if (a.0 - b.0).abs() > gap {
        return a.0 > b.0;
    }
    for (u, v) in a.1.iter().zip(&b.1) {
        if (u - v).abs() > gap {
            return u > v;
        }
    }
    a.2 < b.2
}

/// Best assignment of rows to `d` disjoint components with caps `s_vec`,
/// taking one flow representative per cell of the `(c, γ)` arrangement.
pub fn disjoint_spca_solve(
    a: &Matrix,
    d: usize,
    s_vec: &[usize],
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let start = Instant::now();
    let (r, n) = (a.rows(), a.cols());
    if d == 0 || s_vec.len() != d || s_vec.iter().any(|&s| s == 0) {
        return Err(ComaxError::InvalidInput(
            "s_vec needs d entries, each at least 1".into(),
        ));
    }
    let rt = svec_len(r);
    let q = d * rt + d;
    let forms_count = n * (d + 1) * d / 2 + d;
    let estimate = cell_estimate(forms_count, q, d);
    if q > cfg.budget.max_dim || estimate > cfg.budget.max_cells {
        return Err(ComaxError::BudgetExceeded {
            what: "disjoint SPCA arrangement".into(),
            estimate,
            limit: cfg.budget.max_cells,
        });
    }

    // z = (c_0, …, c_{d−1}, γ_0, …, γ_{d−1}); column d is "unassigned".
    let lifted = lifted_factor(a);
    let mut forms = Vec::with_capacity(forms_count);
    let mut pairs = Vec::new();
    for i in 0..n {
        let li = lifted.column(i);
        for j in 0..d {
            for l in j + 1..=d {
                let mut f = vec![0.0; q];
                f[j * rt..(j + 1) * rt].copy_from_slice(&li);
                f[d * rt + j] = -1.0;
                if l < d {
                    for (k, v) in li.iter().enumerate() {
                        f[l * rt + k] = -v;
                    }
                    f[d * rt + l] = 1.0;
                }
                pairs.push((i, j, l));
                forms.push(f);
            }
        }
    }
    for j in 0..d {
        let mut f = vec![0.0; q];
        f[d * rt + j] = 1.0;
        forms.push(f);
    }
    let space = FormSpace {
        forms: &forms,
        q,
        c_dims: d * rt,
        anchor: None,
    };
    let cells = space.cells(d, cfg)?;

    let mut caps: Vec<i64> = s_vec.iter().map(|&s| s as i64).collect();
    caps.push(n as i64);
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for signs in &cells {
        let gamma = &signs[pairs.len()..];
        if gamma.iter().any(|&g| g < 0) {
            continue;
        }
        // beaten[i][j]: some other column strictly beats j on row i.
        let mut beaten = vec![vec![false; d + 1]; n];
        for (&(i, j, l), &sg) in pairs.iter().zip(signs) {
            match sg {
                1 => beaten[i][l] = true,
                -1 => beaten[i][j] = true,
                _ => {}
            }
        }
        let allowed: Vec<Vec<usize>> = beaten
            .iter()
            .map(|row| (0..=d).filter(|&j| !row[j]).collect())
            .collect();
        let mut exact: Vec<bool> = gamma.iter().map(|&g| g > 0).collect();
        exact.push(false);
        if let Some(labels) = assign_rows(&allowed, &caps, &exact) {
            if seen.insert(labels.clone()) {
                reps.push(labels);
            }
        }
    }

    let scored: Vec<Result<(f64, Vec<f64>, Vec<usize>)>> = cfg.install(|| {
        use rayon::prelude::*;
        reps.par_iter()
            .map(|labels| {
                let z = DisjointAssignment::new(d, labels.clone())?;
                let vals = component_values(a, &z)?;
                Ok((vals.iter().sum(), vals, labels.clone()))
            })
            .collect()
    });
    let mut best: Option<(f64, Vec<f64>, Vec<usize>)> = None;
    for s in scored {
        let s = s?;
        if best.as_ref().map_or(true, |b| disjoint_better(&s, b)) {
            best = Some(s);
        }
    }
    let (value, _, labels) = best.ok_or(ComaxError::NoAttainedOptimum)?;
    let x: Vec<f64> = labels
        .iter()
        .map(|&l| if l < d { 1.0 } else { 0.0 })
        .collect();
    let mut solution = Solution::new(x, value);
    solution.assignment = Some(labels);
    let report = SolveReport {
        regime: "affine".into(),
        complexity: "O((n(d+1)^2)^{d(r^2+r+2)/2-1})".into(),
        rank: r,
        n,
        cell_count: cells.len(),
        candidate_count: reps.len(),
        oracle_calls: reps.len(),
        attained: reps.len(),
        fallback: false,
        wall_ms: Some(start.elapsed().as_secs_f64() * 1e3),
    };
    Ok(Outcome { solution, report })
}

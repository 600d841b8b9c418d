//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Generic over [`Scalar`] so the same code runs in `f64` or in exact
//! rationals. Problems are stated as maximization with general rows and
//! optional variable bounds; they are rewritten internally into
//! `max cᵀy, Ay = b, y ≥ 0, b ≥ 0`.

use crate::error::{ComaxError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<S> {
    pub coeffs: Vec<S>,
    pub rel: Relation,
    pub rhs: S,
}

/// `maximize objectiveᵀx` subject to `rows` and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S = f64> {
    pub objective: Vec<S>,
    pub rows: Vec<Row<S>>,
    pub lower: Vec<Option<S>>,
    pub upper: Vec<Option<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult<S = f64> {
    pub status: LpStatus,
    /// Optimal point (empty unless `Optimal`).
    pub x: Vec<S>,
    pub value: S,
    /// One multiplier per row (empty unless `Optimal`).
    pub duals: Vec<S>,
}

impl<S: Scalar> LpProblem<S> {
    /// Problem over `n` nonnegative variables with no rows.
    pub fn new(objective: Vec<S>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            lower: vec![Some(S::zero()); n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn free(mut self, j: usize) -> Self {
        self.lower[j] = None;
        self.upper[j] = None;
        self
    }

    pub fn all_free(mut self) -> Self {
        self.lower.iter_mut().for_each(|l| *l = None);
        self.upper.iter_mut().for_each(|u| *u = None);
        self
    }

    pub fn bounds(mut self, j: usize, lo: Option<S>, hi: Option<S>) -> Self {
        self.lower[j] = lo;
        self.upper[j] = hi;
        self
    }

    pub fn row(mut self, coeffs: Vec<S>, rel: Relation, rhs: S) -> Self {
        self.rows.push(Row { coeffs, rel, rhs });
        self
    }

    pub fn push_row(&mut self, coeffs: Vec<S>, rel: Relation, rhs: S) {
        self.rows.push(Row { coeffs, rel, rhs });
    }
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone)]
enum VarMap<S> {
    /// `x = lo + y[k]`
    Shift(S, usize),
    /// `x = hi − y[k]`
    Reflect(S, usize),
    /// `x = y[k] − y[k+1]`
    Split(usize),
}

struct Tableau<S> {
    m: usize,
    width: usize,
    /// Row-major `(m + 1) × (width + 1)`; the last row is the objective row
    /// holding `z_j − c_j`, the last column the right-hand side.
    t: Vec<S>,
    basis: Vec<usize>,
    rel: f64,
}

impl<S: Scalar> Tableau<S> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> &S {
        &self.t[i * (self.width + 1) + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let p = self.at(r, c).clone();
        for j in 0..w {
            let v = self.t[r * w + j].clone() / p.clone();
            self.t[r * w + j] = v;
        }
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c].clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in 0..w {
                let v = self.t[i * w + j].clone() - f.clone() * self.t[r * w + j].clone();
                self.t[i * w + j] = v;
            }
            self.t[i * w + c] = S::zero();
        }
        self.basis[r] = c;
    }

    /// Bland's rule iterations on the current objective row. Columns with
    /// `allowed[j] == false` never enter.
    fn run(&mut self, allowed: &[bool]) -> Result<bool> {
        let obj_scale = (0..self.width)
            .map(|j| self.at(self.m, j).abs_val())
            .fold(S::one(), |a, b| if b > a { b } else { a });
        loop {
            let entering = (0..self.width).find(|&j| {
                allowed[j] && {
                    let v = self.at(self.m, j);
                    *v < S::zero() && !v.is_negligible(&obj_scale, self.rel)
                }
            });
            let Some(c) = entering else {
                return Ok(true);
            };
            let col_scale = (0..self.m)
                .map(|i| self.at(i, c).abs_val())
                .fold(S::zero(), |a, b| if b > a { b } else { a });
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if *a <= S::zero() || a.is_negligible(&col_scale, 1e-11) {
                    continue;
                }
                let ratio = self.at(i, self.width).clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            let p = self.at(r, c).clone();
            if !S::EXACT && p.abs_val().is_negligible(&col_scale, 1e-9) {
                return Err(ComaxError::SingularBasis {
                    row: r,
                    col: c,
                    pivot: p.as_f64(),
                });
            }
            self.pivot(r, c);
        }
    }
}

/// Solves the LP in `f64` with the default tolerance.
pub fn solve_lp(p: &LpProblem<f64>) -> Result<LpResult<f64>> {
    solve_lp_with(p, 1e-10)
}

/// Solves the LP over any scalar field; `rel` is the relative optimality
/// tolerance used by the inexact backend.
pub fn solve_lp_with<S: Scalar>(p: &LpProblem<S>, rel: f64) -> Result<LpResult<S>> {
    let n = p.num_vars();
    if p.lower.len() != n || p.upper.len() != n {
        return Err(ComaxError::InvalidInput(
            "bound vectors have wrong length".into(),
        ));
    }
    if n > 200 {
        return Err(ComaxError::InvalidInput(format!(
            "{n} variables exceed the dense LP limit"
        )));
    }
    for r in &p.rows {
        if r.coeffs.len() != n {
            return Err(ComaxError::WrongDimension {
                expected: n,
                found: r.coeffs.len(),
            });
        }
    }

    // Variable substitution into nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, S)> = Vec::new();
    for j in 0..n {
        match (&p.lower[j], &p.upper[j]) {
            (Some(lo), hi) => {
                if let Some(hi) = hi {
                    if hi < lo {
                        return Ok(infeasible());
                    }
                    extra_rows.push((ncols, hi.clone() - lo.clone()));
                }
                maps.push(VarMap::Shift(lo.clone(), ncols));
                ncols += 1;
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Reflect(hi.clone(), ncols));
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split(ncols));
                ncols += 2;
            }
        }
    }

    // Transformed rows: (coeffs over y, rel, rhs, sign flip applied).
    let mut rows: Vec<(Vec<S>, Relation, S, bool)> = Vec::new();
    for r in &p.rows {
        let mut c = vec![S::zero(); ncols];
        let mut rhs = r.rhs.clone();
        for (j, a) in r.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            match &maps[j] {
                VarMap::Shift(lo, k) => {
                    c[*k] = c[*k].clone() + a.clone();
                    rhs = rhs - a.clone() * lo.clone();
                }
                VarMap::Reflect(hi, k) => {
                    c[*k] = c[*k].clone() - a.clone();
                    rhs = rhs - a.clone() * hi.clone();
                }
                VarMap::Split(k) => {
                    c[*k] = c[*k].clone() + a.clone();
                    c[*k + 1] = c[*k + 1].clone() - a.clone();
                }
            }
        }
        rows.push((c, r.rel, rhs, false));
    }
    for (k, width) in &extra_rows {
        let mut c = vec![S::zero(); ncols];
        c[*k] = S::one();
        rows.push((c, Relation::Le, width.clone(), false));
    }
    for row in rows.iter_mut() {
        if row.2 < S::zero() {
            row.0.iter_mut().for_each(|v| *v = -v.clone());
            row.2 = -row.2.clone();
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            row.3 = true;
        }
    }

    // Objective over y; the constant offset is irrelevant to the argmax.
    let mut cy = vec![S::zero(); ncols];
    for (j, cj) in p.objective.iter().enumerate() {
        match &maps[j] {
            VarMap::Shift(_, k) => cy[*k] = cj.clone(),
            VarMap::Reflect(_, k) => cy[*k] = -cj.clone(),
            VarMap::Split(k) => {
                cy[*k] = cj.clone();
                cy[*k + 1] = -cj.clone();
            }
        }
    }

    // Column layout: y | slack/surplus (one per inequality row) | artificial.
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = ncols + n_slack + n_art;
    let w = width + 1;
    let mut t = vec![S::zero(); (m + 1) * w];
    let mut basis = vec![0; m];
    // Column whose tableau entries equal B⁻¹e_i (up to sign), per row.
    let mut unit_col = vec![(0usize, S::one()); m];
    let mut is_art = vec![false; width];
    let (mut si, mut ai) = (ncols, ncols + n_slack);
    for (i, (coeffs, rel, rhs, _)) in rows.iter().enumerate() {
        for (j, v) in coeffs.iter().enumerate() {
            t[i * w + j] = v.clone();
        }
        t[i * w + width] = rhs.clone();
        match rel {
            Relation::Le => {
                t[i * w + si] = S::one();
                basis[i] = si;
                unit_col[i] = (si, S::one());
                si += 1;
            }
            Relation::Ge => {
                t[i * w + si] = -S::one();
                si += 1;
                t[i * w + ai] = S::one();
                basis[i] = ai;
                unit_col[i] = (ai, S::one());
                is_art[ai] = true;
                ai += 1;
            }
            Relation::Eq => {
                t[i * w + ai] = S::one();
                basis[i] = ai;
                unit_col[i] = (ai, S::one());
                is_art[ai] = true;
                ai += 1;
            }
        }
    }
    let mut tab = Tableau {
        m,
        width,
        t,
        basis,
        rel,
    };

    // Phase 1: maximize −Σ artificials.
    if n_art > 0 {
        for j in 0..=width {
            let mut z = S::zero();
            for i in 0..m {
                if is_art[tab.basis[i]] {
                    z = z - tab.at(i, j).clone();
                }
            }
            if j < width && is_art[j] {
                z = z + S::one();
            }
            tab.t[m * w + j] = z;
        }
        for i in 0..m {
            let b = tab.basis[i];
            tab.t[m * w + b] = S::zero();
        }
        let all = vec![true; width];
        tab.run(&all)?;
        let infeas = -tab.at(m, width).clone();
        let rhs_scale = rows
            .iter()
            .fold(S::one(), |a, r| if r.2 > a { r.2.clone() } else { a });
        if infeas > S::zero() && !infeas.is_negligible(&rhs_scale, 1e-9) {
            return Ok(infeasible());
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if !is_art[tab.basis[i]] {
                continue;
            }
            let row_scale = (0..width)
                .map(|j| tab.at(i, j).abs_val())
                .fold(S::zero(), |a, b| if b > a { b } else { a });
            if let Some(c) =
                (0..width).find(|&j| !is_art[j] && !tab.at(i, j).is_negligible(&row_scale, 1e-9))
            {
                tab.pivot(i, c);
            }
        }
    }

    // Phase 2 objective row: z_j − c_j with c over y only.
    let cost = |j: usize| if j < ncols { cy[j].clone() } else { S::zero() };
    for j in 0..=width {
        let mut z = S::zero();
        for i in 0..m {
            z = z + cost(tab.basis[i]) * tab.at(i, j).clone();
        }
        if j < width {
            z = z - cost(j);
        }
        tab.t[m * w + j] = z;
    }
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    if !tab.run(&allowed)? {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            value: S::zero(),
            duals: Vec::new(),
        });
    }

    let mut y = vec![S::zero(); width];
    for i in 0..m {
        y[tab.basis[i]] = tab.at(i, width).clone();
    }
    let x: Vec<S> = maps
        .iter()
        .map(|mp| match mp {
            VarMap::Shift(lo, k) => lo.clone() + y[*k].clone(),
            VarMap::Reflect(hi, k) => hi.clone() - y[*k].clone(),
            VarMap::Split(k) => y[*k].clone() - y[*k + 1].clone(),
        })
        .collect();
    let value = p
        .objective
        .iter()
        .zip(&x)
        .fold(S::zero(), |a, (c, v)| a + c.clone() * v.clone());
    // Row duals: π_i = (z − c) at the unit column of row i, undoing flips.
    let duals = (0..p.rows.len())
        .map(|i| {
            let (col, sgn) = &unit_col[i];
            let raw = tab.at(m, *col).clone() * sgn.clone() + cost(*col);
            if rows[i].3 {
                -raw
            } else {
                raw
            }
        })
        .collect();
    Ok(LpResult {
        status: LpStatus::Optimal,
        x,
        value,
        duals,
    })
}

fn infeasible<S: Scalar>() -> LpResult<S> {
    LpResult {
        status: LpStatus::Infeasible,
        x: Vec::new(),
        value: S::zero(),
        duals: Vec::new(),
    }
}

impl LpResult<f64> {
    /// Largest constraint violation of `x` relative to `1 + ‖rhs‖∞`.
    pub fn primal_residual(&self, p: &LpProblem<f64>) -> f64 {
        let scale = 1.0 + p.rows.iter().fold(0.0_f64, |a, r| a.max(r.rhs.abs_val()));
        let mut worst = 0.0_f64;
        for r in &p.rows {
            let lhs: f64 = r.coeffs.iter().zip(&self.x).map(|(a, b)| a * b).sum();
            let viol = match r.rel {
                Relation::Le => (lhs - r.rhs).max(0.0),
                Relation::Ge => (r.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        for (j, xj) in self.x.iter().enumerate() {
            if let Some(lo) = p.lower[j] {
                worst = worst.max(lo - xj);
            }
            if let Some(hi) = p.upper[j] {
                worst = worst.max(xj - hi);
            }
        }
        worst / scale
    }

    /// Complementary-slackness and dual-sign residual of `(x, duals)`,
    /// including the reduced costs of bounded variables.
    pub fn complementary_slackness_residual(&self, p: &LpProblem<f64>) -> f64 {
        let mut worst = 0.0_f64;
        for (r, pi) in p.rows.iter().zip(&self.duals) {
            let lhs: f64 = r.coeffs.iter().zip(&self.x).map(|(a, b)| a * b).sum();
            let slack = r.rhs - lhs;
            worst = worst.max((pi * slack).abs_val());
            match r.rel {
                Relation::Le => worst = worst.max(-pi),
                Relation::Ge => worst = worst.max(*pi),
                Relation::Eq => {}
            }
        }
        for j in 0..p.num_vars() {
            let d = p.objective[j]
                - p.rows
                    .iter()
                    .zip(&self.duals)
                    .map(|(r, pi)| r.coeffs[j] * pi)
                    .sum::<f64>();
            let at_lo = p.lower[j].is_some_and(|lo| (self.x[j] - lo).abs() <= 1e-9);
            let at_hi = p.upper[j].is_some_and(|hi| (self.x[j] - hi).abs() <= 1e-9);
            let v = match (at_lo, at_hi) {
                (true, true) => 0.0,
                (true, false) => d.max(0.0),
                (false, true) => (-d).max(0.0),
                (false, false) => d.abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

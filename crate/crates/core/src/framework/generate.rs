//! Candidate supports per regime.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::cells::FormSpace;
use super::{ProblemSpec, Provenance, Regime, SupportCandidate};
use crate::comonotone::Permutation;
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    /// `Q(c, λ̄, λ̲)`.
    Standard,
    /// `Q₊(c, λ)`.
    Nonneg,
    /// `Q^sign(c, λ)`.
    SignInv,
    /// `Q^Aff(c, λ, γ)`.
    Affine,
}

/// Index partition induced by one cell of a lifted arrangement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub kind: ThresholdKind,
    /// Forced positive (or forced nonzero, for `SignInv`).
    pub positive: Vec<usize>,
    pub zero: Vec<usize>,
    pub negative: Vec<usize>,
    /// Ties with the upper threshold, in tie order.
    pub tie_upper: Vec<usize>,
    /// Ties with the lower threshold, in tie order.
    pub tie_lower: Vec<usize>,
    /// Both thresholds coincide, so `tie_upper == tie_lower`.
    pub merged: bool,
    /// Sign per index for `SignInv`, `+1` elsewhere.
    pub signs: Vec<i8>,
    /// Active inequality rows (`γ_j > 0`) for `Affine`.
    pub tight: Vec<usize>,
}

impl ThresholdSet {
    pub fn new(kind: ThresholdKind, n: usize) -> Self {
        Self {
            kind,
            positive: Vec::new(),
            zero: Vec::new(),
            negative: Vec::new(),
            tie_upper: Vec::new(),
            tie_lower: Vec::new(),
            merged: false,
            signs: vec![1; n],
            tight: Vec::new(),
        }
    }

    /// Puts the ties in lexicographic order of their columns, then by
    /// index, so identical columns are adjacent.
    pub fn order_ties(&mut self, cols: &[Vec<f64>]) {
        let key = |&a: &usize, &b: &usize| {
            cols[a]
                .iter()
                .zip(&cols[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        };
        self.tie_upper.sort_by(key);
        self.tie_lower.sort_by(key);
    }

    /// Checks that the parts partition `0..n`.
    pub fn is_partition(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        let mut parts = vec![&self.positive, &self.zero, &self.negative, &self.tie_upper];
        if !self.merged {
            parts.push(&self.tie_lower);
        }
        for &i in parts.into_iter().flatten() {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// Supports compatible with the ordering constraints, each with at most
    /// `cap` indices, as `(support, signs, t1, t2)`.
    pub fn supports(&self, cap: usize) -> Vec<(Vec<usize>, Vec<i8>, usize, usize)> {
        let mut out = Vec::new();
        let fixed = self.positive.len() + self.negative.len();
        if fixed > cap {
            return out;
        }
        let room = cap - fixed;
        let emit = |pos: &[usize], neg: &[usize], t1: usize, t2: usize, out: &mut Vec<_>| {
            let mut idx: Vec<(usize, i8)> = self
                .positive
                .iter()
                .chain(pos)
                .map(|&i| (i, self.signs[i]))
                .chain(self.negative.iter().chain(neg).map(|&i| (i, -1)))
                .collect();
            idx.sort_unstable();
            let (s, g): (Vec<usize>, Vec<i8>) = idx.into_iter().unzip();
            out.push((s, g, t1, t2));
        };
        match self.kind {
            ThresholdKind::Standard if self.merged => {
                // Ties in tie order carry a descending block: a positive
                // prefix, a zero block, a negative suffix.
                let t = &self.tie_upper;
                for t1 in 0..=t.len() {
                    for t2 in t1..=t.len() {
                        if t1 + (t.len() - t2) <= room {
                            emit(&t[..t1], &t[t2..], t1, t2, &mut out);
                        }
                    }
                }
            }
            ThresholdKind::Standard => {
                let (u, l) = (&self.tie_upper, &self.tie_lower);
                for k in 0..=u.len() {
                    for j in 0..=l.len() {
                        if k + j <= room {
                            emit(&u[..k], &l[l.len() - j..], k, j, &mut out);
                        }
                    }
                }
            }
            ThresholdKind::Nonneg | ThresholdKind::SignInv | ThresholdKind::Affine => {
                let t = &self.tie_upper;
                for k in 0..=t.len().min(room) {
                    emit(&t[..k], &[], k, 0, &mut out);
                }
            }
        }
        out
    }
}

/// Deduplicated candidates plus the number of cells that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub candidates: Vec<SupportCandidate>,
    pub cells: usize,
}

struct Collector {
    seen: HashSet<(Vec<usize>, Vec<i8>)>,
    out: Vec<SupportCandidate>,
}

impl Collector {
    fn new() -> Self {
        Self {
            seen: HashSet::new(),
            out: Vec::new(),
        }
    }

    fn push(&mut self, indices: Vec<usize>, signs: Vec<i8>, provenance: Provenance) {
        if self.seen.insert((indices.clone(), signs.clone())) {
            self.out.push(SupportCandidate {
                indices,
                signs: Some(signs),
                provenance,
            });
        }
    }

    fn push_all(&mut self, t: &ThresholdSet, cap: usize, cell: usize) {
        for (s, g, t1, t2) in t.supports(cap) {
            self.push(s, g, Provenance { cell, t1, t2 });
        }
    }
}

fn columns(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.cols()).map(|i| a.column(i)).collect()
}

/// `[v, tail…]`.
fn form(v: &[f64], tail: &[f64]) -> Vec<f64> {
    v.iter().chain(tail).copied().collect()
}

fn wrong_regime(want: &str, spec: &ProblemSpec) -> ComaxError {
    ComaxError::InvalidInput(format!(
        "{want} generator called on a {} problem",
        spec.regime().name()
    ))
}

/// Ordering `π` of the columns for one cell of the pairwise arrangement.
fn cell_ordering(n: usize, pair_sign: impl Fn(usize, usize) -> i8) -> Permutation {
    // Rank of `i` = number of columns placed before it; ties go to the
    // lower index.
    let mut before = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if pair_sign(i, j) >= 0 {
                before[j] += 1;
            } else {
                before[i] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (before[i], i));
    Permutation::new(order).expect("sorted indices form a permutation")
}

/// Pairwise arrangement `(a_i − a_j)ᵀc = 0`, orderings `σ = Ψ(π)` and all
/// zero-block supports of `Z(σ)` within the cap.
pub fn generate_supports_general(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<CandidateSet> {
    let Regime::GeneralComonotone(psi) = spec.regime() else {
        return Err(wrong_regime("general", spec));
    };
    let (r, n, cap) = (spec.rank(), spec.n(), spec.cap());
    let cols = columns(spec.a());
    let mut pairs = Vec::new();
    let mut forms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            forms.push(cols[i].iter().zip(&cols[j]).map(|(x, y)| x - y).collect());
        }
    }
    let space = FormSpace {
        forms: &forms,
        q: r,
        c_dims: r,
        anchor: spec.anchor(),
    };
    let cells = space.cells(1, cfg)?;
    let mut index = vec![vec![0usize; n]; n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        index[i][j] = k;
    }
    let mut col = Collector::new();
    for (cell, signs) in cells.iter().enumerate() {
        let pi = cell_ordering(n, |i, j| signs[index[i][j]]);
        let sigma = psi.apply(&pi);
        if sigma.len() != n {
            return Err(ComaxError::InvalidInput(format!(
                "permutation mapping returned length {} for n = {n}",
                sigma.len()
            )));
        }
        let order = sigma.order();
        for t1 in 0..=n {
            for t2 in t1..=n {
                if t1 + (n - t2) > cap {
                    continue;
                }
                let mut idx: Vec<(usize, i8)> = order[..t1]
                    .iter()
                    .map(|&i| (i, 1))
                    .chain(order[t2..].iter().map(|&i| (i, -1)))
                    .collect();
                idx.sort_unstable();
                let (s, g) = idx.into_iter().unzip();
                col.push(s, g, Provenance { cell, t1, t2 });
            }
        }
    }
    Ok(CandidateSet {
        candidates: col.out,
        cells: cells.len(),
    })
}

/// Lifted arrangement in `(c, λ̄, λ̲)` with planes `a_iᵀc = λ̄`, `a_iᵀc = λ̲`
/// and `λ̄ = λ̲`; one threshold set per cell with `λ̄ ≥ λ̲`.
pub fn generate_supports_standard(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<CandidateSet> {
    if !matches!(spec.regime(), Regime::Standard) {
        return Err(wrong_regime("standard", spec));
    }
    let (r, n) = (spec.rank(), spec.n());
    let cols = columns(spec.a());
    let mut forms: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 1);
    forms.extend(cols.iter().map(|a| form(a, &[-1.0, 0.0])));
    forms.extend(cols.iter().map(|a| form(a, &[0.0, -1.0])));
    let mut gap = vec![0.0; r];
    gap.extend([1.0, -1.0]);
    forms.push(gap);
    let space = FormSpace {
        forms: &forms,
        q: r + 2,
        c_dims: r,
        anchor: spec.anchor(),
    };
    let cells = space.cells(2, cfg)?;
    let mut col = Collector::new();
    for (cell, s) in cells.iter().enumerate() {
        let g = s[2 * n];
        if g < 0 {
            continue;
        }
        let mut t = ThresholdSet::new(ThresholdKind::Standard, n);
        t.merged = g == 0;
        for i in 0..n {
            let (up, lo) = (s[i], s[n + i]);
            if up > 0 {
                t.positive.push(i);
            } else if up == 0 {
                t.tie_upper.push(i);
            } else if lo > 0 {
                t.zero.push(i);
            } else if lo == 0 {
                t.tie_lower.push(i);
            } else {
                t.negative.push(i);
            }
        }
        t.order_ties(&cols);
        if t.merged {
            t.tie_lower = t.tie_upper.clone();
        }
        col.push_all(&t, spec.cap(), cell);
    }
    Ok(CandidateSet {
        candidates: col.out,
        cells: cells.len(),
    })
}

/// Arrangement of `a_iᵀc = λ` in `(c, λ)`; supports `{i : a_iᵀc > λ}`
/// extended by prefixes of the tie block.
pub fn generate_supports_nonneg(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<CandidateSet> {
    if !matches!(spec.regime(), Regime::NonnegStandard) {
        return Err(wrong_regime("nonneg", spec));
    }
    let (r, n) = (spec.rank(), spec.n());
    let cols = columns(spec.a());
    let forms: Vec<Vec<f64>> = cols.iter().map(|a| form(a, &[-1.0])).collect();
    let space = FormSpace {
        forms: &forms,
        q: r + 1,
        c_dims: r,
        anchor: spec.anchor(),
    };
    let cells = space.cells(2, cfg)?;
    let mut col = Collector::new();
    for (cell, s) in cells.iter().enumerate() {
        let mut t = ThresholdSet::new(ThresholdKind::Nonneg, n);
        for (i, &si) in s.iter().enumerate() {
            match si {
                1 => t.positive.push(i),
                0 => t.tie_upper.push(i),
                _ => t.zero.push(i),
            }
        }
        t.order_ties(&cols);
        col.push_all(&t, spec.cap(), cell);
    }
    Ok(CandidateSet {
        candidates: col.out,
        cells: cells.len(),
    })
}

/// Arrangement of `a_iᵀc = ±λ` and `λ = 0` in `(c, λ)`; supports
/// `{i : |a_iᵀc| > λ}` plus tie prefixes, signed by `a_iᵀc`. The empty
/// support is never emitted.
pub fn generate_supports_signinv(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<CandidateSet> {
    if !matches!(spec.regime(), Regime::SignInvStandard) {
        return Err(wrong_regime("signinv", spec));
    }
    let (r, n) = (spec.rank(), spec.n());
    let cols = columns(spec.a());
    let mut forms: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 1);
    forms.extend(cols.iter().map(|a| form(a, &[-1.0])));
    forms.extend(cols.iter().map(|a| form(a, &[1.0])));
    let mut lam = vec![0.0; r];
    lam.push(1.0);
    forms.push(lam);
    let space = FormSpace {
        forms: &forms,
        q: r + 1,
        c_dims: r,
        anchor: spec.anchor(),
    };
    let cells = space.cells(2, cfg)?;
    let mut col = Collector::new();
    for (cell, s) in cells.iter().enumerate() {
        if s[2 * n] < 0 {
            continue;
        }
        let mut t = ThresholdSet::new(ThresholdKind::SignInv, n);
        for i in 0..n {
            // Signs of a_iᵀc − λ and a_iᵀc + λ.
            let (up, lo) = (s[i], s[n + i]);
            if up > 0 {
                t.positive.push(i);
            } else if lo < 0 {
                t.positive.push(i);
                t.signs[i] = -1;
            } else if up == 0 {
                t.tie_upper.push(i);
            } else if lo == 0 {
                t.tie_upper.push(i);
                t.signs[i] = -1;
            } else {
                t.zero.push(i);
            }
        }
        t.order_ties(&cols);
        for (supp, _, t1, t2) in t.supports(spec.cap()) {
            if supp.is_empty() {
                continue;
            }
            let signs = supp.iter().map(|&i| t.signs[i]).collect();
            col.push(supp, signs, Provenance { cell, t1, t2 });
        }
    }
    Ok(CandidateSet {
        candidates: col.out,
        cells: cells.len(),
    })
}

/// Runs the generator that matches the spec's regime.
pub fn generate_candidates(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<CandidateSet> {
    match spec.regime() {
        Regime::GeneralComonotone(_) => generate_supports_general(spec, cfg),
        Regime::Standard => generate_supports_standard(spec, cfg),
        Regime::NonnegStandard => generate_supports_nonneg(spec, cfg),
        Regime::SignInvStandard => generate_supports_signinv(spec, cfg),
        Regime::AffineRestricted { .. } => {
            let oracle = super::affine::BinaryPolytope::from_spec(spec)?;
            let (reps, cells) = super::affine::representatives(spec, &oracle, cfg)?;
            let mut col = Collector::new();
            for (x, provenance) in reps {
                let supp: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.5).collect();
                let signs = vec![1; supp.len()];
                col.push(supp, signs, provenance);
            }
            Ok(CandidateSet {
                candidates: col.out,
                cells,
            })
        }
    }
}

//! Comonotone sets: permutations and ordering cones, finite point sets with
//! exact linear maximization, comonotonicity checkers and permutation
//! mappings realized by matroid greedy.

mod checker;
mod matroid;

use std::fmt;
use std::io::Read;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{ComaxError, Result};
use crate::scalar::{decimal_rational, Scalar};

pub use checker::{
    certify_psi, check_comonotone_2d, check_standard_comonotone, check_standard_comonotone_with,
    check_surjective_psi_implies_standard, Verdict, ViolationKind,
};
pub use matroid::{
    enumerate_feasible, greedy_max_linear, matroid_psi, validate_matroid, GraphicMatroid,
    MatroidKind, MatroidOracle, MatroidPsi, MatroidSpec, PartitionMatroid, UniformMatroid,
};

/// A ranking of `[n]`: `order[k]` is the index in position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(ComaxError::InvalidInput(format!(
                    "{order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { order })
    }

    /// From 1-based positions as written in the literature.
    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(ComaxError::InvalidInput(
                "one-based permutation contains 0".into(),
            ));
        }
        Self::new(order.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.order.iter().map(|i| i + 1).collect()
    }

    pub fn reversed(&self) -> Self {
        Self {
            order: self.order.iter().rev().copied().collect(),
        }
    }

    /// `rank[i]` is the position of index `i`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (k, &i) in self.order.iter().enumerate() {
            rank[i] = k;
        }
        rank
    }

    /// The ordering of `x` in decreasing value, ties by lower index.
    pub fn sorting<S: PartialOrd>(x: &[S]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| {
            x[b].partial_cmp(&x[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        Self { order }
    }

    /// Membership of `x` in the cone `Z(π)`.
    pub fn sorts<S: PartialOrd>(&self, x: &[S]) -> bool {
        self.order.windows(2).all(|w| x[w[0]] >= x[w[1]])
    }

    /// `x(π)`: the entries of `x` rearranged so that they are sorted by `π`.
    pub fn arrange<S: PartialOrd + Clone>(&self, x: &[S]) -> Vec<S> {
        let sorted = Self::sorting(x);
        let mut out = x.to_vec();
        for (k, &i) in self.order.iter().enumerate() {
            out[i] = x[sorted.order[k]].clone();
        }
        out
    }

    /// All permutations of `[n]` in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { order: cur.clone() });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = ComaxError;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.order
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A map `Π_n → Π_n` assigning each cost ordering the ordering of some
/// maximizer.
pub trait PermutationMapping: Send + Sync {
    fn apply(&self, pi: &Permutation) -> Permutation;

    fn cost_label(&self) -> &'static str {
        "T2"
    }
}

/// `Ψ(π) = π`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPsi;

impl PermutationMapping for IdentityPsi {
    fn apply(&self, pi: &Permutation) -> Permutation {
        pi.clone()
    }
}

/// `Ψ(π) = σ` for every `π`.
#[derive(Debug, Clone)]
pub struct ConstantPsi(pub Permutation);

impl PermutationMapping for ConstantPsi {
    fn apply(&self, _pi: &Permutation) -> Permutation {
        self.0.clone()
    }
}

/// A mapping given by a closure.
pub struct FnPsi<F>(pub F);

impl<F: Fn(&Permutation) -> Permutation + Send + Sync> PermutationMapping for FnPsi<F> {
    fn apply(&self, pi: &Permutation) -> Permutation {
        (self.0)(pi)
    }
}

pub type SharedPsi = Arc<dyn PermutationMapping>;

/// Whether `psi` hits every permutation of `[n]`.
pub fn is_surjective(psi: &dyn PermutationMapping, n: usize) -> bool {
    let mut hit: std::collections::HashSet<Permutation> = std::collections::HashSet::new();
    for pi in Permutation::all(n) {
        hit.insert(psi.apply(&pi));
    }
    hit.len() == (1..=n).product::<usize>()
}

/// A nonempty finite set of points of equal dimension, sorted and
/// deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointSet {
    points: Vec<Vec<f64>>,
}

impl FinitePointSet {
    pub fn new(mut points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| ComaxError::InvalidInput("empty point set".into()))?;
        for p in points.iter_mut() {
            if p.len() != n {
                return Err(ComaxError::WrongDimension {
                    expected: n,
                    found: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(ComaxError::InvalidInput("non-finite coordinate".into()));
            }
            // Fold -0.0 into 0.0 so duplicates sort together.
            p.iter_mut().for_each(|v| *v += 0.0);
        }
        points.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        points.dedup();
        Ok(Self { points })
    }

    /// One point per row, comma separated, no header; `#` lines are comments.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        Self::new(crate::io::read_csv_rows(reader)?)
    }

    /// The set `{x ∈ {0,1}^n : pred(x)}`.
    pub fn binary_where(n: usize, pred: impl Fn(&[f64]) -> bool) -> Result<Self> {
        let pts = (0..1usize << n)
            .map(|m| (0..n).map(|i| ((m >> i) & 1) as f64).collect::<Vec<f64>>())
            .filter(|x| pred(x))
            .collect();
        Self::new(pts)
    }

    /// Closure of `points` under coordinate permutations.
    pub fn permutation_closure(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        let perms = Permutation::all(n);
        let mut out = Vec::with_capacity(points.len() * perms.len());
        for p in points {
            for pi in &perms {
                out.push(pi.order().iter().map(|&i| p[i]).collect());
            }
        }
        Self::new(out)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Coordinates as exact rationals, each read from its shortest round-trip
    /// decimal.
    pub fn exact_points(&self) -> Vec<Vec<BigRational>> {
        self.points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&v| decimal_rational(v).expect("finite"))
                    .collect()
            })
            .collect()
    }

    /// All maximizers of `vᵀx` in exact arithmetic, inputs read as their
    /// shortest round-trip decimals.
    pub fn argmax_linear(&self, v: &[f64]) -> Result<Vec<Vec<f64>>> {
        if v.len() != self.dim() {
            return Err(ComaxError::WrongDimension {
                expected: self.dim(),
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(ComaxError::InvalidInput("non-finite cost vector".into()));
        }
        let vq: Vec<BigRational> = v
            .iter()
            .map(|&x| decimal_rational(x).expect("finite"))
            .collect();
        let idx = argmax_indices(&self.exact_points(), &vq);
        Ok(idx.into_iter().map(|i| self.points[i].clone()).collect())
    }
}

/// Indices of all maximizers of `vᵀx` over `points`; ties are exact
/// equality of the scalar type.
pub fn argmax_indices<S: Scalar>(points: &[Vec<S>], v: &[S]) -> Vec<usize> {
    let mut best: Option<S> = None;
    let mut out = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let val = crate::scalar::dot(v, p);
        match &best {
            Some(b) if val < *b => {}
            Some(b) if val == *b => out.push(k),
            _ => {
                best = Some(val);
                out.clear();
                out.push(k);
            }
        }
    }
    out
}

//! Convex maximization `max f(Ax)` over comonotone sets by support enumeration.
//!
//! The cost-parameter space of the linear counterpart `max cᵀAx` is cut by a
//! hyperplane arrangement; every cell fixes the threshold or ordering
//! structure of `Aᵀc`, which in turn fixes a handful of candidate supports.
//! A fixed-support oracle then solves the problem on each candidate.

mod affine;
pub(crate) mod cells;
mod generate;
mod objectives;

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use affine::{affine_restricted_candidates, BinaryPolytope, RepresentativeOracle};
pub use generate::{
    generate_candidates, generate_supports_general, generate_supports_nonneg,
    generate_supports_signinv, generate_supports_standard, CandidateSet, ThresholdKind,
    ThresholdSet,
};
pub use objectives::{
    svec, svec_len, unsvec, ConvexQuadratic, FnObjective, KyFanObjective, LinearObjective,
    ProjectedObjective, SquaredNorm, TstObjective,
};

use crate::comonotone::SharedPsi;
use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::numerics::Matrix;

/// A function `f : R^r → R`, convex unless the spec is flagged quasi-convex.
pub trait Objective: Send + Sync {
    fn rank(&self) -> usize;
    fn value(&self, y: &[f64]) -> f64;
    fn subgradient(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// A coordinate on which every subgradient is strictly positive. Lets
    /// the generators work on the slice `c_k = 1` of the cost space.
    fn positive_coordinate(&self) -> Option<usize> {
        None
    }
}

/// Fixed-support subproblem solver.
pub trait SupportOracle: Send + Sync {
    fn evaluate(&self, candidate: &SupportCandidate) -> Result<OracleOutcome>;
    /// Whether the sign pattern of a candidate changes the answer.
    fn sign_sensitive(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Attained(Solution),
    /// No optimum with this support; optionally some feasible point anyway.
    NotAttained {
        fallback: Option<Solution>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Sorted, 0-based.
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    /// Set when the point is a non-attaining oracle's fallback.
    #[serde(default)]
    pub fallback: bool,
    /// Column per row for assignment problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
}

impl Solution {
    pub fn new(x: Vec<f64>, value: f64) -> Self {
        let support = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        Self {
            x,
            value,
            support,
            signs: None,
            fallback: false,
            assignment: None,
        }
    }

    pub fn with_support(mut self, support: Vec<usize>) -> Self {
        self.support = support;
        self
    }

    /// Support as 1-based indices.
    pub fn one_based_support(&self) -> Vec<usize> {
        self.support.iter().map(|i| i + 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    /// Position of the generating cell in the sorted cell list.
    pub cell: usize,
    pub t1: usize,
    pub t2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportCandidate {
    /// Sorted, 0-based.
    pub indices: Vec<usize>,
    pub signs: Option<Vec<i8>>,
    pub provenance: Provenance,
}

impl SupportCandidate {
    pub fn new(indices: Vec<usize>) -> Self {
        Self {
            indices,
            signs: None,
            provenance: Provenance {
                cell: 0,
                t1: 0,
                t2: 0,
            },
        }
    }
}

#[derive(Clone)]
pub enum Regime {
    GeneralComonotone(SharedPsi),
    Standard,
    NonnegStandard,
    SignInvStandard,
    /// Binary feasible set cut by `Mx ≤ b`.
    AffineRestricted {
        m: Matrix,
        b: Vec<f64>,
    },
}

impl std::fmt::Debug for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::GeneralComonotone(_) => "general",
            Regime::Standard => "standard",
            Regime::NonnegStandard => "nonneg",
            Regime::SignInvStandard => "signinv",
            Regime::AffineRestricted { .. } => "affine",
        }
    }

    /// Candidate-count bound as a function of `n`.
    pub fn complexity_label(&self) -> &'static str {
        match self {
            Regime::GeneralComonotone(_) => "O(n^{2r})",
            Regime::Standard => "O(n^{r+1})",
            Regime::NonnegStandard | Regime::SignInvStandard => "O(n^r)",
            Regime::AffineRestricted { .. } => "O((n+m)^{r+m})",
        }
    }

    /// Exponent of the candidate-count bound for rank `r`.
    pub fn exponent(&self, r: usize) -> usize {
        match self {
            Regime::GeneralComonotone(_) => 2 * r,
            Regime::Standard => r + 1,
            Regime::NonnegStandard | Regime::SignInvStandard => r,
            Regime::AffineRestricted { m, .. } => r + m.rows(),
        }
    }
}

/// Problem `max f(Ax)` over a comonotone set with sparsity cap `s`.
#[derive(Clone)]
pub struct ProblemSpec {
    a: Matrix,
    objective: Arc<dyn Objective>,
    regime: Regime,
    oracle: Arc<dyn SupportOracle>,
    cap: usize,
    compact: bool,
    quasi_convex: bool,
    adapted: bool,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("r", &self.rank())
            .field("n", &self.n())
            .field("regime", &self.regime)
            .field("cap", &self.cap)
            .finish()
    }
}

/// Relative pivot tolerance of the load-time rank check.
pub const RANK_TOL: f64 = 1e-9;

impl ProblemSpec {
    pub fn new(
        a: Matrix,
        objective: Arc<dyn Objective>,
        regime: Regime,
        oracle: Arc<dyn SupportOracle>,
    ) -> Result<Self> {
        let (r, n) = (a.rows(), a.cols());
        if a.rank(RANK_TOL) != r {
            return Err(ComaxError::InvalidInput(format!(
                "factor matrix is not of full row rank {r}"
            )));
        }
        if objective.rank() != r {
            return Err(ComaxError::WrongDimension {
                expected: r,
                found: objective.rank(),
            });
        }
        if let Regime::AffineRestricted { m, b } = &regime {
            if m.cols() != n {
                return Err(ComaxError::WrongDimension {
                    expected: n,
                    found: m.cols(),
                });
            }
            if b.len() != m.rows() {
                return Err(ComaxError::WrongDimension {
                    expected: m.rows(),
                    found: b.len(),
                });
            }
        }
        Ok(Self {
            a,
            objective,
            regime,
            oracle,
            cap: n,
            compact: true,
            quasi_convex: false,
            adapted: false,
        })
    }

    /// Sparsity cap `‖x‖₀ ≤ s`.
    pub fn with_cap(mut self, s: usize) -> Result<Self> {
        if s == 0 || s > self.n() {
            return Err(ComaxError::InvalidInput(format!(
                "sparsity {s} outside 1..={}",
                self.n()
            )));
        }
        self.cap = s;
        Ok(self)
    }

    /// Declares whether `AX` is compact.
    pub fn with_compact(mut self, compact: bool) -> Self {
        self.compact = compact;
        self
    }

    /// Declares `f` quasi-convex and upper semicontinuous instead of convex.
    pub fn with_quasi_convex(mut self, flag: bool) -> Self {
        self.quasi_convex = flag;
        self
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn regime(&self) -> &Regime {
        &self.regime
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    pub fn oracle(&self) -> &dyn SupportOracle {
        self.oracle.as_ref()
    }

    pub fn is_quasi_convex(&self) -> bool {
        self.quasi_convex
    }

    pub fn is_adapted(&self) -> bool {
        self.adapted
    }

    /// `f(Ax)`.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.objective.value(&self.a.mul_vec(x))
    }

    /// Anchor coordinate for the cost space, unused once adapted.
    pub(crate) fn anchor(&self) -> Option<usize> {
        if self.adapted || self.quasi_convex {
            None
        } else {
            self.objective.positive_coordinate()
        }
    }
}

/// Returns a subgradient of `f` at `Ax̂`: the cost vector of the linear
/// counterpart that `x̂` certifies.
pub fn reduce_to_linear(spec: &ProblemSpec, x_hat: &[f64]) -> Result<Vec<f64>> {
    if x_hat.len() != spec.n() {
        return Err(ComaxError::WrongDimension {
            expected: spec.n(),
            found: x_hat.len(),
        });
    }
    if spec.quasi_convex {
        return Err(ComaxError::ObjectiveContractViolation(
            "quasi-convex objectives have no subgradient".into(),
        ));
    }
    spec.objective
        .subgradient(&spec.a.mul_vec(x_hat))
        .ok_or_else(|| ComaxError::ObjectiveContractViolation("subgradient unavailable".into()))
}

/// Accepts a quasi-convex objective on a compact image. Candidate
/// generation is unchanged; no subgradient is ever requested.
pub fn quasiconvex_adapter(spec: ProblemSpec) -> Result<ProblemSpec> {
    if !spec.quasi_convex {
        return Err(ComaxError::PreconditionUnmet(
            "objective is not flagged quasi-convex".into(),
        ));
    }
    if !spec.compact {
        return Err(ComaxError::PreconditionUnmet(
            "quasi-convex reduction needs a compact image AX".into(),
        ));
    }
    Ok(ProblemSpec {
        adapted: true,
        ..spec
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub regime: String,
    pub complexity: String,
    pub rank: usize,
    pub n: usize,
    pub cell_count: usize,
    pub candidate_count: usize,
    pub oracle_calls: usize,
    pub attained: usize,
    /// The returned point came from a fallback, not an attained optimum.
    pub fallback: bool,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub solution: Solution,
    pub report: SolveReport,
}

/// Relative gap under which two objective values count as tied.
pub const VALUE_TIE_REL: f64 = 1e-12;

/// Whether `a` beats the incumbent `b`: larger value, then smaller support,
/// then lexicographically smaller `x`.
pub fn better(a: &Solution, b: &Solution) -> bool {
    let gap = VALUE_TIE_REL * (1.0 + a.value.abs().max(b.value.abs()));
    if a.value > b.value + gap {
        return true;
    }
    if a.value < b.value - gap {
        return false;
    }
    match a.support.cmp(&b.support) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            for (u, v) in a.x.iter().zip(&b.x) {
                match u.total_cmp(v) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            false
        }
    }
}

/// Keeps the better of `best` and `cand`.
pub fn keep_best(best: &mut Option<Solution>, cand: Solution) {
    match best {
        Some(b) if !better(&cand, b) => {}
        _ => *best = Some(cand),
    }
}

/// Evaluates candidates in parallel and reduces them in candidate order.
pub fn evaluate_candidates(
    oracle: &dyn SupportOracle,
    candidates: &[SupportCandidate],
    cfg: &SolverConfig,
) -> Result<(Option<Solution>, Option<Solution>, usize)> {
    let outcomes: Vec<Result<OracleOutcome>> =
        cfg.install(|| candidates.par_iter().map(|c| oracle.evaluate(c)).collect());
    let mut best = None;
    let mut fallback = None;
    let mut attained = 0;
    for o in outcomes {
        match o? {
            OracleOutcome::Attained(s) => {
                attained += 1;
                keep_best(&mut best, s);
            }
            OracleOutcome::NotAttained {
                fallback: Some(mut s),
            } => {
                s.fallback = true;
                keep_best(&mut fallback, s);
            }
            OracleOutcome::NotAttained { fallback: None } => {}
        }
    }
    Ok((best, fallback, attained))
}

/// Runs the regime's generator and the fixed-support oracle, returning the
/// best attained solution.
pub fn solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Outcome> {
    if spec.quasi_convex && !spec.adapted {
        return Err(ComaxError::PreconditionUnmet(
            "quasi-convex objective must pass through quasiconvex_adapter".into(),
        ));
    }
    let start = Instant::now();
    let set = generate_candidates(spec, cfg)?;
    let calls = oracle_calls(spec.oracle(), &set.candidates);
    let (best, fallback, attained) = evaluate_candidates(spec.oracle(), &calls, cfg)?;
    let solution = match (best, fallback) {
        (Some(s), _) => s,
        (None, Some(f)) => f,
        (None, None) => return Err(ComaxError::NoAttainedOptimum),
    };
    let report = SolveReport {
        regime: spec.regime.name().into(),
        complexity: spec.regime.complexity_label().into(),
        rank: spec.rank(),
        n: spec.n(),
        cell_count: set.cells,
        candidate_count: set.candidates.len(),
        oracle_calls: calls.len(),
        attained,
        fallback: solution.fallback,
        wall_ms: Some(start.elapsed().as_secs_f64() * 1e3),
    };
    Ok(Outcome { solution, report })
}

/// Collapses candidates that the oracle cannot tell apart.
fn oracle_calls(
    oracle: &dyn SupportOracle,
    candidates: &[SupportCandidate],
) -> Vec<SupportCandidate> {
    if oracle.sign_sensitive() {
        return candidates.to_vec();
    }
    let mut seen = std::collections::HashSet::new();
    candidates
        .iter()
        .filter(|c| seen.insert(c.indices.clone()))
        .map(|c| SupportCandidate {
            signs: None,
            ..c.clone()
        })
        .collect()
}

//! Objectives used by the applications and tests.

use std::sync::Arc;

use super::Objective;
use crate::error::{ComaxError, Result};
use crate::numerics::{dot, sym_eig, Matrix, SymMatrix};

/// `‖y‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaredNorm {
    pub rank: usize,
}

impl Objective for SquaredNorm {
    fn rank(&self) -> usize {
        self.rank
    }

    fn value(&self, y: &[f64]) -> f64 {
        dot(y, y)
    }

    fn subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        Some(y.iter().map(|v| 2.0 * v).collect())
    }
}

/// `cᵀy`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearObjective {
    pub c: Vec<f64>,
}

impl Objective for LinearObjective {
    fn rank(&self) -> usize {
        self.c.len()
    }

    fn value(&self, y: &[f64]) -> f64 {
        dot(&self.c, y)
    }

    fn subgradient(&self, _y: &[f64]) -> Option<Vec<f64>> {
        Some(self.c.clone())
    }
}

/// `yᵀQy + bᵀy` with `Q` positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexQuadratic {
    q: SymMatrix,
    b: Vec<f64>,
}

impl ConvexQuadratic {
    pub fn new(q: SymMatrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != q.order() {
            return Err(ComaxError::WrongDimension {
                expected: q.order(),
                found: b.len(),
            });
        }
        let eig = sym_eig(&q)?;
        let low = eig.values.last().copied().unwrap_or(0.0);
        if low < -1e-9 * (1.0 + q.max_abs()) {
            return Err(ComaxError::ObjectiveContractViolation(format!(
                "quadratic form has negative eigenvalue {low:e}"
            )));
        }
        Ok(Self { q, b })
    }

    pub fn q(&self) -> &SymMatrix {
        &self.q
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

impl Objective for ConvexQuadratic {
    fn rank(&self) -> usize {
        self.b.len()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.q.quad_form(y) + dot(&self.b, y)
    }

    fn subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        let qy = self.q.mul_vec(y);
        Some(qy.iter().zip(&self.b).map(|(a, b)| 2.0 * a + b).collect())
    }
}

/// `Σ_{k<r} y_k² + y_r` on `R^{r+1}`: a squared norm plus one linear
/// coordinate, whose partial derivative is identically one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TstObjective {
    pub r: usize,
}

impl Objective for TstObjective {
    fn rank(&self) -> usize {
        self.r + 1
    }

    fn value(&self, y: &[f64]) -> f64 {
        dot(&y[..self.r], &y[..self.r]) + y[self.r]
    }

    fn subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        let mut g: Vec<f64> = y[..self.r].iter().map(|v| 2.0 * v).collect();
        g.push(1.0);
        Some(g)
    }

    fn positive_coordinate(&self) -> Option<usize> {
        Some(self.r)
    }
}

pub fn svec_len(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Upper triangle row by row, off-diagonal entries scaled by `√2` so that
/// `svec(A)ᵀsvec(B) = ⟨A, B⟩_F`.
pub fn svec(m: &SymMatrix) -> Vec<f64> {
    let k = m.order();
    let mut out = Vec::with_capacity(svec_len(k));
    for i in 0..k {
        for j in i..k {
            let v = m.get(i, j);
            out.push(if i == j {
                v
            } else {
                v * std::f64::consts::SQRT_2
            });
        }
    }
    out
}

/// Inverse of [`svec`] for matrices of order `k`.
pub fn unsvec(y: &[f64], k: usize) -> SymMatrix {
    let mut rows = vec![vec![0.0; k]; k];
    let mut p = 0;
    for i in 0..k {
        for j in i..k {
            let v = if i == j {
                y[p]
            } else {
                y[p] / std::f64::consts::SQRT_2
            };
            rows[i][j] = v;
            rows[j][i] = v;
            p += 1;
        }
    }
    SymMatrix::from_fn(k, |i, j| rows[i][j])
}

/// Sum of the `d` largest eigenvalues of `unsvec(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KyFanObjective {
    pub order: usize,
    pub d: usize,
}

impl KyFanObjective {
    pub fn norm(&self, m: &SymMatrix) -> f64 {
        sym_eig(m).map_or(f64::NAN, |e| e.top_sum(self.d))
    }
}

impl Objective for KyFanObjective {
    fn rank(&self) -> usize {
        svec_len(self.order)
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.norm(&unsvec(y, self.order))
    }

    /// `svec` of the projector onto the top-`d` eigenvectors.
    fn subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        let eig = sym_eig(&unsvec(y, self.order)).ok()?;
        let k = self.order;
        let d = self.d.min(k);
        let p = SymMatrix::from_fn(k, |i, j| eig.vectors[..d].iter().map(|v| v[i] * v[j]).sum());
        Some(svec(&p))
    }
}

/// `g(y) = f(Uy)` for a `q × k` matrix `U`; used to drop redundant rows of
/// a factor without changing the objective.
#[derive(Clone)]
pub struct ProjectedObjective {
    pub inner: Arc<dyn Objective>,
    pub u: Matrix,
}

impl Objective for ProjectedObjective {
    fn rank(&self) -> usize {
        self.u.cols()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.inner.value(&self.u.mul_vec(y))
    }

    fn subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        let g = self.inner.subgradient(&self.u.mul_vec(y))?;
        Some(self.u.tr_mul_vec(&g))
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Objective from closures.
#[derive(Clone)]
pub struct FnObjective {
    pub rank: usize,
    pub value: Arc<ValueFn>,
    pub gradient: Option<Arc<GradFn>>,
}

impl FnObjective {
    pub fn new(rank: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            rank,
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }
}

impl Objective for FnObjective {
    fn rank(&self) -> usize {
        self.rank
    }

    fn value(&self, y: &[f64]) -> f64 {
        (self.value)(y)
    }

    fn subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(y))
    }
}

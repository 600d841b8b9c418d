//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use serde::{Deserialize, Serialize};

use super::matrix::SymMatrix;
use crate::error::{ComaxError, Result};

const MAX_ORDER: usize = 64;
const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by nonincreasing eigenvalue. `vectors[k]` belongs to
/// `values[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// Sum of the `d` largest eigenvalues.
    pub fn top_sum(&self, d: usize) -> f64 {
        self.values.iter().take(d).sum()
    }

    /// Groups eigenvalue indices whose consecutive gaps are within
    /// `rel · max(|λ_max|, tiny)`.
    pub fn groups(&self, rel: f64) -> Vec<Vec<usize>> {
        let scale = self
            .values
            .iter()
            .fold(0.0_f64, |a, v| a.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (k, v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(g) if (self.values[*g.last().unwrap()] - v).abs() <= rel * scale => g.push(k),
                _ => out.push(vec![k]),
            }
        }
        out
    }
}

/// Eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.order();
    if n > MAX_ORDER {
        return Err(ComaxError::InvalidInput(format!(
            "order {n} exceeds the dense eigensolver limit {MAX_ORDER}"
        )));
    }
    if m.data().iter().any(|x| !x.is_finite()) {
        return Err(ComaxError::InvalidInput("non-finite matrix entry".into()));
    }
    let mut a = m.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = f64::EPSILON * frob;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Largest eigenvalue with its eigenvector, sign-normalized so the first
/// nonzero coordinate is positive.
pub fn leading_eigenpair(m: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    let eig = sym_eig(m)?;
    let mut x = eig.vectors[0].clone();
    normalize_sign(&mut x);
    Ok((eig.values[0], x))
}

/// Flips `x` so that its first coordinate of non-negligible size is positive.
pub fn normalize_sign(x: &mut [f64]) {
    let scale = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

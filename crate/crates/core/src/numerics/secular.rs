//! Root of the trust-region secular equation
//! `φ(μ) = Σ (b_i/2)² / (μ − λ_i)² = 1` on `(λ₁, ∞)`.

use crate::error::{ComaxError, Result};

const MAX_ITERS: usize = 500;

pub fn phi(eigvals: &[f64], b: &[f64], mu: f64) -> f64 {
    eigvals
        .iter()
        .zip(b)
        .map(|(l, bi)| {
            let h = bi / 2.0;
            if h == 0.0 {
                0.0
            } else {
                h * h / ((mu - l) * (mu - l))
            }
        })
        .sum()
}

fn dphi(eigvals: &[f64], b: &[f64], mu: f64) -> f64 {
    eigvals
        .iter()
        .zip(b)
        .map(|(l, bi)| {
            let h = bi / 2.0;
            if h == 0.0 {
                0.0
            } else {
                -2.0 * h * h / ((mu - l) * (mu - l) * (mu - l))
            }
        })
        .sum()
}

/// Bracket `(lo, hi)` with `φ(lo⁺) > 1 ≥ φ(hi)`, or the hard-case signal.
fn bracket(eigvals: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if eigvals.is_empty() || eigvals.len() != b.len() {
        return Err(ComaxError::InvalidInput(
            "secular data has mismatched lengths".into(),
        ));
    }
    if eigvals.windows(2).any(|w| w[0] < w[1]) {
        return Err(ComaxError::InvalidInput(
            "eigenvalues must be sorted descending".into(),
        ));
    }
    let l1 = eigvals[0];
    let scale = eigvals.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let top_zero = eigvals
        .iter()
        .zip(b)
        .filter(|(l, _)| l1 - **l <= 1e-12 * scale)
        .all(|(_, bi)| *bi == 0.0);
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Err(ComaxError::HardCase);
    }
    if top_zero {
        let rest: f64 = eigvals
            .iter()
            .zip(b)
            .filter(|(l, _)| l1 - **l > 1e-12 * scale)
            .map(|(l, bi)| (bi / 2.0) * (bi / 2.0) / ((l1 - l) * (l1 - l)))
            .sum();
        if rest <= 1.0 {
            return Err(ComaxError::HardCase);
        }
    }
    Ok((l1, l1 + bnorm / 2.0))
}

/// Safeguarded Newton iteration on `1/√φ − 1`, falling back to bisection
/// whenever a step leaves the current bracket.
pub fn secular_root(eigvals: &[f64], b: &[f64], tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket(eigvals, b)?;
    let mut mu = hi;
    let mut best = (f64::INFINITY, mu);
    for _ in 0..MAX_ITERS {
        let f = phi(eigvals, b, mu);
        let res = (f - 1.0).abs();
        if res < best.0 {
            best = (res, mu);
        }
        if res <= tol {
            return Ok(mu);
        }
        if f > 1.0 {
            lo = lo.max(mu);
        } else {
            hi = hi.min(mu);
        }
        let psi = 1.0 / f.sqrt() - 1.0;
        let dpsi = -0.5 * f.powf(-1.5) * dphi(eigvals, b, mu);
        let mut next = mu - psi / dpsi;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if next == mu || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        mu = next;
    }
    Ok(best.1)
}

/// Bisection-only reference solver.
pub fn secular_root_bisect(eigvals: &[f64], b: &[f64]) -> Result<f64> {
    let (mut lo, mut hi) = bracket(eigvals, b)?;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(eigvals, b, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

//! Sign vectors of linear forms over the cells of their arrangement.

use crate::arrangement::{enumerate_cells, ArrangementOptions, Hyperplane};
use crate::config::SolverConfig;
use crate::error::Result;
use crate::numerics::Matrix;

/// Homogeneous linear forms `φ_k(z) = formsₖᵀz` on `z ∈ R^q`, of which the
/// first `c_dims` coordinates are the cost vector.
pub(crate) struct FormSpace<'a> {
    pub forms: &'a [Vec<f64>],
    pub q: usize,
    pub c_dims: usize,
    /// Restrict to the slice `z_k = 1`.
    pub anchor: Option<usize>,
}

impl FormSpace<'_> {
    /// Sign vectors (one entry per form) of every cell of codimension at
    /// most `max_codim`, skipping cells on which `c` must vanish.
    pub fn cells(&self, max_codim: usize, cfg: &SolverConfig) -> Result<Vec<Vec<i8>>> {
        let rel = cfg.tol.zero_rel;
        let scale = self
            .forms
            .iter()
            .flatten()
            .fold(0.0_f64, |a, v| a.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let negligible = |v: f64| v.abs() <= rel * scale;

        // Each form is either a plane of the arrangement or constant.
        let mut planes = Vec::new();
        let mut slot: Vec<std::result::Result<usize, i8>> = Vec::with_capacity(self.forms.len());
        for f in self.forms {
            let (normal, offset) = match self.anchor {
                Some(k) => {
                    let mut nrm = f.clone();
                    let fk = nrm.remove(k);
                    (nrm, -fk)
                }
                None => (f.clone(), 0.0),
            };
            if normal.iter().all(|v| negligible(*v)) {
                let s = if negligible(offset) {
                    0
                } else if offset < 0.0 {
                    1
                } else {
                    -1
                };
                slot.push(Err(s));
            } else {
                slot.push(Ok(planes.len()));
                planes.push(Hyperplane::new(normal, offset));
            }
        }
        let dim = self.q - usize::from(self.anchor.is_some());
        let opts = ArrangementOptions::from(cfg);
        let raw = enumerate_cells(&planes, dim, max_codim.min(dim), &opts)?;
        let mut out = Vec::with_capacity(raw.len());
        for cell in raw {
            let signs: Vec<i8> = slot
                .iter()
                .map(|s| match s {
                    Ok(p) => cell.signs[*p],
                    Err(c) => *c,
                })
                .collect();
            if self.anchor.is_none() && self.forces_zero_cost(&signs, rel) {
                continue;
            }
            out.push(signs);
        }
        Ok(out)
    }

    /// Whether the forms vanishing on a cell pin the cost vector to zero.
    fn forces_zero_cost(&self, signs: &[i8], rel: f64) -> bool {
        let zero: Vec<Vec<f64>> = self
            .forms
            .iter()
            .zip(signs)
            .filter(|(_, s)| **s == 0)
            .map(|(f, _)| f.clone())
            .collect();
        let base = if zero.is_empty() {
            0
        } else {
            Matrix::from_rows(&zero).map_or(0, |m| m.rank(rel))
        };
        let mut with_c = zero;
        for j in 0..self.c_dims {
            let mut e = vec![0.0; self.q];
            e[j] = 1.0;
            with_c.push(e);
        }
        let full = Matrix::from_rows(&with_c).map_or(0, |m| m.rank(rel));
        full == base
    }
}

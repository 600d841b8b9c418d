//! Cell enumeration for hyperplane arrangements in low dimension.
//!
//! Full-dimensional cells are found by inserting planes one at a time: the
//! cells cut by plane `p` are exactly the cells of the arrangement that the
//! earlier planes induce on `p`, so witnesses for the two new pieces are
//! obtained recursively and pushed off `p` by half the distance to the
//! nearest earlier plane. Lower-dimensional cells are the full-dimensional
//! cells of the arrangements induced on flats `∩F` for independent `F`.

mod flat;

use std::collections::HashSet;

use rayon::prelude::*;

pub use flat::{restrict_to_flat, Flat, FlatRestriction, InducedPlane};

use crate::config::SolverConfig;
use crate::error::{ComaxError, Result};
use crate::scalar::{dot, dot_scale, Scalar};
use flat::{echelon, flat_from_echelon, induce, Induced};

/// `{z : normalᵀz = offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<S = f64> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> Hyperplane<S> {
    pub fn new(normal: Vec<S>, offset: S) -> Self {
        Self { normal, offset }
    }

    pub fn central(normal: Vec<S>) -> Self {
        Self {
            normal,
            offset: S::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `(normalᵀz − offset, magnitude of the summed terms)`.
    pub fn eval(&self, z: &[S]) -> (S, S) {
        (
            dot(&self.normal, z) - self.offset.clone(),
            dot_scale(&self.normal, z) + self.offset.abs_val(),
        )
    }

    pub fn sign_at(&self, z: &[S], rel: f64) -> i8 {
        let (v, s) = self.eval(z);
        v.sign_rel(&s, rel)
    }

    fn is_degenerate(&self, rel: f64) -> bool {
        let scale =
            self.normal.iter().fold(S::zero(), |a, v| a + v.abs_val()) + self.offset.abs_val();
        self.normal.iter().all(|v| v.is_negligible(&scale, rel)) || self.normal.is_empty()
    }
}

/// A cell: sign per hyperplane, an interior witness and its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CellWitness<S = f64> {
    pub signs: Vec<i8>,
    pub witness: Vec<S>,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrangementOptions {
    pub zero_rel: f64,
    pub max_cells: f64,
    pub max_dim: usize,
    pub parallel: bool,
}

impl Default for ArrangementOptions {
    fn default() -> Self {
        Self::from(&SolverConfig::default())
    }
}

impl From<&SolverConfig> for ArrangementOptions {
    fn from(c: &SolverConfig) -> Self {
        Self {
            zero_rel: c.tol.zero_rel,
            max_cells: c.budget.max_cells,
            max_dim: c.budget.max_dim,
            parallel: c.threads != 1,
        }
    }
}

/// Scales `h` so that its pivot normal entry equals one. The pivot is the
/// first nonzero entry for exact scalars and the first entry of maximal
/// magnitude otherwise. Returns the scaled plane and the sign of the divisor.
pub(crate) fn canonical_form<S: Scalar>(h: &Hyperplane<S>) -> (Hyperplane<S>, i8) {
    let pivot = if S::EXACT {
        h.normal.iter().position(|v| !v.is_exact_zero())
    } else {
        let max = h.normal.iter().fold(
            S::zero(),
            |a, v| if v.abs_val() > a { v.abs_val() } else { a },
        );
        let cut = max.clone() - max * S::from_float(1e-6);
        h.normal.iter().position(|v| v.abs_val() >= cut)
    };
    let p = h.normal[pivot.unwrap_or(0)].clone();
    let orient = if p < S::zero() { -1 } else { 1 };
    (
        Hyperplane {
            normal: h.normal.iter().map(|v| v.clone() / p.clone()).collect(),
            offset: h.offset.clone() / p,
        },
        orient,
    )
}

pub(crate) fn same_plane<S: Scalar>(a: &Hyperplane<S>, b: &Hyperplane<S>, rel: f64) -> bool {
    let close = |x: &S, y: &S| {
        let scale = S::one() + x.abs_val() + y.abs_val();
        (x.clone() - y.clone()).is_negligible(&scale, rel)
    };
    a.normal.len() == b.normal.len()
        && a.normal.iter().zip(&b.normal).all(|(x, y)| close(x, y))
        && close(&a.offset, &b.offset)
}

/// Removes repeated planes (up to scaling); keeps first occurrences.
fn dedup_planes<S: Scalar>(planes: Vec<Hyperplane<S>>, rel: f64) -> Vec<Hyperplane<S>> {
    let mut canon: Vec<Hyperplane<S>> = Vec::with_capacity(planes.len());
    let mut out = Vec::with_capacity(planes.len());
    for h in planes {
        let c = canonical_form(&h).0;
        if !canon.iter().any(|x| same_plane(x, &c, rel)) {
            canon.push(c);
            out.push(h);
        }
    }
    out
}

/// Chart of a single hyperplane: eliminate the coordinate with the largest
/// normal entry.
struct PlaneChart<'a, S> {
    plane: &'a Hyperplane<S>,
    pivot: usize,
}

impl<'a, S: Scalar> PlaneChart<'a, S> {
    fn new(plane: &'a Hyperplane<S>) -> Self {
        let mut pivot = 0;
        for (k, v) in plane.normal.iter().enumerate() {
            if v.abs_val() > plane.normal[pivot].abs_val() {
                pivot = k;
            }
        }
        Self { plane, pivot }
    }

    fn induce(&self, g: &Hyperplane<S>, rel: f64) -> Option<Hyperplane<S>> {
        let n = &self.plane.normal;
        let np = n[self.pivot].clone();
        let gp = g.normal[self.pivot].clone();
        let ratio = gp / np;
        let mut normal = Vec::with_capacity(n.len() - 1);
        let mut scale = S::zero();
        for k in (0..n.len()).filter(|&k| k != self.pivot) {
            let t = ratio.clone() * n[k].clone();
            scale = scale + g.normal[k].abs_val() + t.abs_val();
            normal.push(g.normal[k].clone() - t);
        }
        if normal.iter().all(|v| v.is_negligible(&scale, rel)) {
            return None;
        }
        Some(Hyperplane {
            normal,
            offset: g.offset.clone() - ratio * self.plane.offset.clone(),
        })
    }

    fn lift(&self, u: &[S]) -> Vec<S> {
        let n = &self.plane.normal;
        let mut z = Vec::with_capacity(n.len());
        let mut rest = self.plane.offset.clone();
        let mut it = u.iter();
        for k in 0..n.len() {
            if k == self.pivot {
                z.push(S::zero());
            } else {
                let v = it.next().expect("chart dimension").clone();
                rest = rest - n[k].clone() * v.clone();
                z.push(v);
            }
        }
        z[self.pivot] = rest / n[self.pivot].clone();
        z
    }
}

/// Points `w ± ε·n_h`, each `ε` half the step along `±n_h` to the nearest
/// of `others` on that side.
fn nudge<S: Scalar>(w: &[S], h: &Hyperplane<S>, others: &[Hyperplane<S>], rel: f64) -> Vec<Vec<S>> {
    let mut reach: [Option<S>; 2] = [None, None];
    for g in others {
        let (dn, dscale) = (dot(&g.normal, &h.normal), dot_scale(&g.normal, &h.normal));
        if dn.is_negligible(&dscale, rel) {
            continue;
        }
        let t = -(g.eval(w).0 / dn);
        let (side, step) = if t.as_f64() >= 0.0 { (0, t) } else { (1, -t) };
        if step.is_exact_zero() {
            return Vec::new();
        }
        if reach[side].as_ref().is_none_or(|e| step < *e) {
            reach[side] = Some(step);
        }
    }
    let far = w.iter().fold(S::one(), |a, v| a + v.abs_val());
    [S::one(), -S::one()]
        .into_iter()
        .zip(reach)
        .map(|(dir, r)| {
            let eps = r.map_or_else(|| far.clone(), |e| e.half());
            w.iter()
                .zip(&h.normal)
                .map(|(wk, nk)| wk.clone() + dir.clone() * eps.clone() * nk.clone())
                .collect()
        })
        .collect()
}

/// Witnesses are built off every plane by construction, so their signs are
/// read at roundoff level rather than at the structural tolerance.
const STRICT_REL: f64 = 1e-13;

fn strict_signs<S: Scalar>(planes: &[Hyperplane<S>], z: &[S], rel: f64) -> Option<Vec<i8>> {
    let mut out = Vec::with_capacity(planes.len());
    for h in planes {
        let s = h.sign_at(z, rel.min(STRICT_REL));
        if s == 0 {
            return None;
        }
        out.push(s);
    }
    Some(out)
}

/// Replaces an exact witness by the coarsest dyadic point with the same
/// strict signs, which keeps rational sizes from compounding.
fn simplify<S: Scalar>(z: Vec<S>, signs: &[i8], planes: &[Hyperplane<S>]) -> Vec<S> {
    for bits in 0..64 {
        let y: Vec<S> = z.iter().map(|v| v.snap(bits)).collect();
        if planes
            .iter()
            .zip(signs)
            .all(|(h, &s)| h.sign_at(&y, 0.0) == s)
        {
            return y;
        }
    }
    z
}

/// One witness per full-dimensional cell of `planes` in `R^d`. Planes must
/// have nonzero normals and be pairwise distinct.
pub(crate) fn full_cells<S: Scalar>(planes: &[Hyperplane<S>], d: usize, rel: f64) -> Vec<Vec<S>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut cells: Vec<(Vec<i8>, Vec<S>)> = vec![(Vec::new(), vec![S::zero(); d])];
    for p in 0..planes.len() {
        let h = &planes[p];
        let prior = &planes[..p];
        let upto = &planes[..=p];
        let mut seen: HashSet<Vec<i8>> = HashSet::with_capacity(cells.len() * 2);
        let mut next: Vec<(Vec<i8>, Vec<S>)> = Vec::with_capacity(cells.len() * 2);
        let offer = |z: Vec<S>, seen: &mut HashSet<Vec<i8>>, next: &mut Vec<(Vec<i8>, Vec<S>)>| {
            if let Some(sv) = strict_signs(upto, &z, rel) {
                if seen.insert(sv.clone()) {
                    let z = if S::EXACT { simplify(z, &sv, upto) } else { z };
                    next.push((sv, z));
                }
            }
        };
        for (mut signs, w) in std::mem::take(&mut cells) {
            let s = h.sign_at(&w, rel);
            if s != 0 {
                signs.push(s);
                if seen.insert(signs.clone()) {
                    next.push((signs, w));
                }
            } else {
                for z in nudge(&w, h, prior, rel) {
                    offer(z, &mut seen, &mut next);
                }
            }
        }
        let chart = PlaneChart::new(h);
        let induced = dedup_planes(
            prior.iter().filter_map(|g| chart.induce(g, rel)).collect(),
            rel,
        );
        for u in full_cells(&induced, d - 1, rel) {
            let w = chart.lift(&u);
            for z in nudge(&w, h, prior, rel) {
                offer(z, &mut seen, &mut next);
            }
        }
        cells = next;
    }
    cells.into_iter().map(|(_, w)| w).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper estimate of the work of enumerating cells up to `max_codim`.
pub fn cell_estimate(p: usize, q: usize, max_codim: usize) -> f64 {
    (0..=max_codim.min(q))
        .map(|k| binomial(p, k) * (0..=q - k).map(|i| binomial(p, i)).sum::<f64>())
        .sum()
}

/// An arrangement with coincident planes merged.
#[derive(Debug, Clone)]
pub struct Arrangement<S = f64> {
    dim: usize,
    planes: Vec<Hyperplane<S>>,
    /// Input index ↦ (merged index, orientation relative to the merged plane).
    back_map: Vec<(usize, i8)>,
    rel: f64,
}

impl<S: Scalar> Arrangement<S> {
    pub fn new(input: &[Hyperplane<S>], q: usize, rel: f64) -> Result<Self> {
        let mut planes: Vec<Hyperplane<S>> = Vec::new();
        let mut canon: Vec<(Hyperplane<S>, i8)> = Vec::new();
        let mut back_map = Vec::with_capacity(input.len());
        for h in input {
            if h.dim() != q {
                return Err(ComaxError::WrongDimension {
                    expected: q,
                    found: h.dim(),
                });
            }
            if h.is_degenerate(rel) {
                return Err(ComaxError::InvalidInput(
                    "hyperplane with zero normal".into(),
                ));
            }
            let (c, o) = canonical_form(h);
            match canon.iter().position(|(x, _)| same_plane(x, &c, rel)) {
                Some(k) => back_map.push((k, o * canon[k].1)),
                None => {
                    back_map.push((planes.len(), 1));
                    planes.push(h.clone());
                    canon.push((c, o));
                }
            }
        }
        Ok(Self {
            dim: q,
            planes,
            back_map,
            rel,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct planes after merging.
    pub fn planes(&self) -> &[Hyperplane<S>] {
        &self.planes
    }

    pub fn back_map(&self) -> &[(usize, i8)] {
        &self.back_map
    }

    /// Expands signs over merged planes to signs over the input planes.
    pub fn expand(&self, merged: &[i8]) -> Vec<i8> {
        self.back_map.iter().map(|&(k, o)| merged[k] * o).collect()
    }

    /// Canonical flats `∩F` for independent `F` with `1 ≤ |F| ≤ max_codim`,
    /// each given by a basis `F` and its closure (all planes containing it).
    fn flats(&self, max_codim: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let p = self.planes.len();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..p).rev().map(|i| vec![i]).collect();
        while let Some(f) = stack.pop() {
            let act: Vec<&Hyperplane<S>> = f.iter().map(|&i| &self.planes[i]).collect();
            let Ok((rows, pivots)) = echelon(&act, self.dim, self.rel) else {
                continue;
            };
            let flat = flat_from_echelon(&rows, &pivots, self.dim);
            let closure: Vec<usize> = (0..p)
                .filter(|&i| {
                    f.contains(&i)
                        || matches!(
                            induce(&flat, &self.planes[i], self.rel),
                            Induced::Constant(0)
                        )
                })
                .collect();
            if f.len() < max_codim && f.len() < self.dim {
                let last = *f.last().expect("nonempty");
                for j in (last + 1..p).rev() {
                    if !closure.contains(&j) {
                        let mut g = f.clone();
                        g.push(j);
                        stack.push(g);
                    }
                }
            }
            if seen.insert(closure.clone()) {
                out.push((f, closure));
            }
        }
        out
    }

    fn cells_on_flat(&self, basis: &[usize], closure: &[usize]) -> Vec<CellWitness<S>> {
        let q = self.dim;
        let flat = if basis.is_empty() {
            Flat::identity(q)
        } else {
            let act: Vec<&Hyperplane<S>> = basis.iter().map(|&i| &self.planes[i]).collect();
            let (rows, pivots) = echelon(&act, q, self.rel).expect("independent basis");
            flat_from_echelon(&rows, &pivots, q)
        };
        let induced: Vec<Hyperplane<S>> = self
            .planes
            .iter()
            .enumerate()
            .filter(|(i, _)| !closure.contains(i))
            .filter_map(|(_, g)| match induce(&flat, g, self.rel) {
                Induced::Plane(h) => Some(h),
                Induced::Constant(_) => None,
            })
            .collect();
        let induced = dedup_planes(induced, self.rel);
        let dim = q - basis.len();
        full_cells(&induced, flat.dim(), self.rel)
            .into_iter()
            .filter_map(|u| {
                let z = flat.lift(&u);
                let mut signs = Vec::with_capacity(self.planes.len());
                for (i, h) in self.planes.iter().enumerate() {
                    if closure.contains(&i) {
                        signs.push(0);
                    } else {
                        let s = h.sign_at(&z, self.rel.min(STRICT_REL));
                        if s == 0 {
                            return None;
                        }
                        signs.push(s);
                    }
                }
                Some(CellWitness {
                    signs,
                    witness: z,
                    dim,
                })
            })
            .collect()
    }

    /// Cells of codimension at most `max_codim`, signs over the merged planes,
    /// sorted lexicographically by sign vector.
    pub fn merged_cells(
        &self,
        max_codim: usize,
        opts: &ArrangementOptions,
    ) -> Result<Vec<CellWitness<S>>> {
        if self.dim > opts.max_dim {
            return Err(ComaxError::BudgetExceeded {
                what: "arrangement dimension".into(),
                estimate: self.dim as f64,
                limit: opts.max_dim as f64,
            });
        }
        let est = cell_estimate(self.planes.len(), self.dim, max_codim);
        if est > opts.max_cells {
            return Err(ComaxError::BudgetExceeded {
                what: "arrangement cells".into(),
                estimate: est,
                limit: opts.max_cells,
            });
        }
        let mut flats = vec![(Vec::new(), Vec::new())];
        if max_codim > 0 {
            flats.extend(self.flats(max_codim));
        }
        let per_flat: Vec<Vec<CellWitness<S>>> = if opts.parallel {
            flats
                .par_iter()
                .map(|(b, c)| self.cells_on_flat(b, c))
                .collect()
        } else {
            flats
                .iter()
                .map(|(b, c)| self.cells_on_flat(b, c))
                .collect()
        };
        let mut seen: HashSet<Vec<i8>> = HashSet::new();
        let mut cells: Vec<CellWitness<S>> = per_flat
            .into_iter()
            .flatten()
            .filter(|c| seen.insert(c.signs.clone()))
            .collect();
        cells.sort_by(|a, b| a.signs.cmp(&b.signs));
        Ok(cells)
    }

    /// Like [`Arrangement::merged_cells`] but with signs over the input planes.
    pub fn cells(
        &self,
        max_codim: usize,
        opts: &ArrangementOptions,
    ) -> Result<Vec<CellWitness<S>>> {
        let mut cells = self.merged_cells(max_codim, opts)?;
        for c in cells.iter_mut() {
            c.signs = self.expand(&c.signs);
        }
        cells.sort_by(|a, b| a.signs.cmp(&b.signs));
        Ok(cells)
    }
}

/// Enumerates every cell of codimension `≤ max_codim`, one witness each,
/// with sign vectors indexed by the input planes.
pub fn enumerate_cells<S: Scalar>(
    planes: &[Hyperplane<S>],
    q: usize,
    max_codim: usize,
    opts: &ArrangementOptions,
) -> Result<Vec<CellWitness<S>>> {
    if planes.is_empty() {
        return Ok(vec![CellWitness {
            signs: Vec::new(),
            witness: vec![S::zero(); q],
            dim: q,
        }]);
    }
    Arrangement::new(planes, q, opts.zero_rel)?.cells(max_codim, opts)
}

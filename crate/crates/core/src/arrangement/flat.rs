//! Affine charts of flats and the arrangements they induce.

use super::{canonical_form, same_plane, Hyperplane};
use crate::error::{ComaxError, Result};
use crate::scalar::{dot, dot_scale, Scalar};

/// Affine parametrization `z = origin + Σ_f u_f · basis[f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flat<S = f64> {
    pub origin: Vec<S>,
    pub basis: Vec<Vec<S>>,
}

impl<S: Scalar> Flat<S> {
    pub fn identity(q: usize) -> Self {
        Self {
            origin: vec![S::zero(); q],
            basis: (0..q)
                .map(|k| {
                    (0..q)
                        .map(|j| if j == k { S::one() } else { S::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn lift(&self, u: &[S]) -> Vec<S> {
        let mut z = self.origin.clone();
        for (uf, b) in u.iter().zip(&self.basis) {
            if uf.is_exact_zero() {
                continue;
            }
            for (zk, bk) in z.iter_mut().zip(b) {
                *zk = zk.clone() + uf.clone() * bk.clone();
            }
        }
        z
    }
}

/// A hyperplane of the induced arrangement together with the input planes
/// it came from and their orientation relative to it.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedPlane<S = f64> {
    pub plane: Hyperplane<S>,
    pub sources: Vec<(usize, i8)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatRestriction<S = f64> {
    pub flat: Flat<S>,
    /// Distinct induced hyperplanes in flat coordinates.
    pub induced: Vec<InducedPlane<S>>,
    /// Planes with constant sign on the flat; sign 0 means the plane
    /// contains the flat.
    pub constant: Vec<(usize, i8)>,
}

/// Restriction of one plane to a flat: either a hyperplane in flat
/// coordinates or a constant sign.
pub(crate) enum Induced<S> {
    Plane(Hyperplane<S>),
    Constant(i8),
}

pub(crate) fn induce<S: Scalar>(flat: &Flat<S>, g: &Hyperplane<S>, rel: f64) -> Induced<S> {
    let normal: Vec<S> = flat.basis.iter().map(|b| dot(&g.normal, b)).collect();
    let degenerate = flat
        .basis
        .iter()
        .zip(&normal)
        .all(|(b, v)| v.is_negligible(&dot_scale(&g.normal, b), rel));
    let at_origin = dot(&g.normal, &flat.origin);
    let offset = g.offset.clone() - at_origin.clone();
    if degenerate {
        let scale = dot_scale(&g.normal, &flat.origin) + g.offset.abs_val();
        Induced::Constant((-offset).sign_rel(&scale, rel))
    } else {
        Induced::Plane(Hyperplane { normal, offset })
    }
}

/// Reduced row echelon form of `[N | b]` for the active planes. Returns
/// `(rows, pivot columns)` or `DependentActiveSet`.
pub(crate) fn echelon<S: Scalar>(
    planes: &[&Hyperplane<S>],
    q: usize,
    rel: f64,
) -> Result<(Vec<Vec<S>>, Vec<usize>)> {
    let mut rows: Vec<Vec<S>> = planes
        .iter()
        .map(|h| {
            let mut r = h.normal.clone();
            r.push(h.offset.clone());
            r
        })
        .collect();
    let scales: Vec<S> = rows
        .iter()
        .map(|r| {
            r[..q].iter().fold(
                S::zero(),
                |a, v| if v.abs_val() > a { v.abs_val() } else { a },
            )
        })
        .collect();
    let k = rows.len();
    let mut pivots = Vec::with_capacity(k);
    let mut rank = 0;
    for col in 0..q {
        if rank == k {
            break;
        }
        let mut best: Option<(usize, S)> = None;
        for (i, row) in rows.iter().enumerate().skip(rank) {
            let v = row[col].abs_val();
            if v.is_negligible(&scales[i], rel) {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((i, v));
            }
        }
        let Some((pi, _)) = best else { continue };
        rows.swap(rank, pi);
        let p = rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v = v.clone() / p.clone();
        }
        for i in 0..k {
            if i == rank {
                continue;
            }
            let f = rows[i][col].clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in 0..=q {
                let v = rows[i][j].clone() - f.clone() * rows[rank][j].clone();
                rows[i][j] = v;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < k {
        return Err(ComaxError::DependentActiveSet);
    }
    Ok((rows, pivots))
}

/// Parametrization of `∩ active` from its echelon form.
pub(crate) fn flat_from_echelon<S: Scalar>(rows: &[Vec<S>], pivots: &[usize], q: usize) -> Flat<S> {
    let mut origin = vec![S::zero(); q];
    for (row, &p) in rows.iter().zip(pivots) {
        origin[p] = row[q].clone();
    }
    let basis = (0..q)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut b = vec![S::zero(); q];
            b[f] = S::one();
            for (row, &p) in rows.iter().zip(pivots) {
                b[p] = -row[f].clone();
            }
            b
        })
        .collect();
    Flat { origin, basis }
}

/// Restricts `planes` to the flat `∩ active`.
pub fn restrict_to_flat<S: Scalar>(
    planes: &[Hyperplane<S>],
    active: &[usize],
    rel: f64,
) -> Result<FlatRestriction<S>> {
    let q = planes
        .first()
        .map(|h| h.normal.len())
        .ok_or_else(|| ComaxError::InvalidInput("empty arrangement".into()))?;
    if active.iter().any(|&i| i >= planes.len()) {
        return Err(ComaxError::InvalidInput("active index out of range".into()));
    }
    let act: Vec<&Hyperplane<S>> = active.iter().map(|&i| &planes[i]).collect();
    let flat = if act.is_empty() {
        Flat::identity(q)
    } else {
        let (rows, pivots) = echelon(&act, q, rel)?;
        flat_from_echelon(&rows, &pivots, q)
    };
    let mut induced: Vec<InducedPlane<S>> = Vec::new();
    let mut canon: Vec<Hyperplane<S>> = Vec::new();
    let mut constant = Vec::new();
    for (i, g) in planes.iter().enumerate() {
        match induce(&flat, g, rel) {
            Induced::Constant(s) => constant.push((i, s)),
            Induced::Plane(h) => {
                let (c, orient) = canonical_form(&h);
                match canon.iter().position(|x| same_plane(x, &c, rel)) {
                    Some(k) => {
                        let o = orient * canonical_form(&induced[k].plane).1;
                        induced[k].sources.push((i, o));
                    }
                    None => {
                        canon.push(c);
                        induced.push(InducedPlane {
                            plane: h,
                            sources: vec![(i, 1)],
                        });
                    }
                }
            }
        }
    }
    Ok(FlatRestriction {
        flat,
        induced,
        constant,
    })
}

//! Exact comonotonicity checks over the cost-space arrangement of a finite
//! set.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{argmax_indices, is_surjective, FinitePointSet, Permutation, PermutationMapping};
use crate::arrangement::{enumerate_cells, ArrangementOptions, CellWitness, Hyperplane};
use crate::error::{ComaxError, Result};
use crate::scalar::Scalar;

const MAX_DIM: usize = 5;
const MAX_POINTS: usize = 64;
/// Cap on the number of integer cost vectors tried when searching for a
/// small violation witness.
const WITNESS_SEARCH: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `v_i > v_j` but every maximizer has `x_i < x_j`.
    Strict,
    /// `v_i = v_j` but every maximizer has `x_i < x_j`.
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Yes,
    /// Cost vector `v` and 0-based indices `i, j` such that no maximizer of
    /// `vᵀx` satisfies `x_i ≥ x_j`.
    No {
        v: Vec<BigRational>,
        i: usize,
        j: usize,
        kind: ViolationKind,
    },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn witness_f64(&self) -> Option<Vec<f64>> {
        match self {
            Verdict::Yes => None,
            Verdict::No { v, .. } => Some(v.iter().map(Scalar::as_f64).collect()),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => write!(f, "YES"),
            Verdict::No { v, i, j, kind } => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(
                    f,
                    "NO v=({}) i={} j={} {:?}",
                    parts.join(","),
                    i + 1,
                    j + 1,
                    kind
                )
            }
        }
    }
}

fn exact(set: &FinitePointSet) -> Vec<Vec<BigRational>> {
    set.exact_points()
}

/// First violated ordered pair at cost `v`, strict violations first.
fn violation(
    points: &[Vec<BigRational>],
    v: &[BigRational],
    want: Option<ViolationKind>,
) -> Option<(usize, usize, ViolationKind)> {
    let m = argmax_indices(points, v);
    let n = v.len();
    for kind in [ViolationKind::Strict, ViolationKind::Tie] {
        if want.is_some_and(|w| w != kind) {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let applies = match kind {
                    ViolationKind::Strict => v[i] > v[j],
                    ViolationKind::Tie => v[i] == v[j],
                };
                if applies && !m.iter().any(|&k| points[k][i] >= points[k][j]) {
                    return Some((i, j, kind));
                }
            }
        }
    }
    None
}

fn check_limits(set: &FinitePointSet) -> Result<()> {
    if set.dim() > MAX_DIM || set.len() > MAX_POINTS {
        return Err(ComaxError::BudgetExceeded {
            what: "comonotonicity check (dimension, points)".into(),
            estimate: (set.dim() * 1000 + set.len()) as f64,
            limit: (MAX_DIM * 1000 + MAX_POINTS) as f64,
        });
    }
    Ok(())
}

/// Cells of the arrangement `{vᵀ(x−x′)=0} ∪ {v_i=v_j}` in exact arithmetic.
fn cost_cells(
    points: &[Vec<BigRational>],
    n: usize,
    opts: &ArrangementOptions,
) -> Result<Vec<CellWitness<BigRational>>> {
    let mut planes = Vec::new();
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let normal: Vec<BigRational> = points[a]
                .iter()
                .zip(&points[b])
                .map(|(x, y)| x - y)
                .collect();
            planes.push(Hyperplane::central(normal));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut normal = vec![<BigRational as Scalar>::zero(); n];
            normal[i] = <BigRational as Scalar>::from_int(1);
            normal[j] = <BigRational as Scalar>::from_int(-1);
            planes.push(Hyperplane::central(normal));
        }
    }
    enumerate_cells(&planes, n, n, opts)
}

/// Integer vectors of sup-norm `k`, in lexicographic order.
fn shell(n: usize, k: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * k + 1) as u64;
    (0..side.pow(n as u32)).filter_map(move |mut code| {
        let mut v = vec![0i64; n];
        for slot in v.iter_mut().rev() {
            *slot = (code % side) as i64 - k;
            code /= side;
        }
        (v.iter().map(|x| x.abs()).max() == Some(k)).then_some(v)
    })
}

fn small_witness(points: &[Vec<BigRational>], n: usize) -> Option<Verdict> {
    for kind in [ViolationKind::Strict, ViolationKind::Tie] {
        let mut k = 0i64;
        while ((2 * k + 3) as usize).pow(n as u32) <= WITNESS_SEARCH {
            k += 1;
            for v in shell(n, k) {
                let vq: Vec<BigRational> = v
                    .iter()
                    .map(|&x| <BigRational as Scalar>::from_int(x))
                    .collect();
                if let Some((i, j, kind)) = violation(points, &vq, Some(kind)) {
                    return Some(Verdict::No { v: vq, i, j, kind });
                }
            }
        }
    }
    None
}

/// Integer multiple of a rational vector.
fn clear_denominators(v: &[BigRational]) -> Vec<BigRational> {
    let l = v
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, x| lcm(&acc, x.denom()));
    v.iter()
        .map(|x| x * BigRational::from_integer(l.clone()))
        .collect()
}

fn lcm(a: &num_bigint::BigInt, b: &num_bigint::BigInt) -> num_bigint::BigInt {
    let (mut x, mut y) = (a.abs(), b.abs());
    let prod = &x * &y;
    while !y.is_zero() {
        let t = &x % &y;
        x = y;
        y = t;
    }
    prod / x
}

/// Decides standard comonotonicity of a finite set: the pairwise ordering
/// conditions hold at one cost vector per cell of the cost-space
/// arrangement. A NO verdict carries the first integer witness in sup-norm
/// then lexicographic order, strict violations before tie violations, else
/// a cell witness.
pub fn check_standard_comonotone(set: &FinitePointSet) -> Result<Verdict> {
    check_standard_comonotone_with(set, &ArrangementOptions::default())
}

pub fn check_standard_comonotone_with(
    set: &FinitePointSet,
    opts: &ArrangementOptions,
) -> Result<Verdict> {
    check_limits(set)?;
    let n = set.dim();
    let pts = exact(set);
    let cells = cost_cells(&pts, n, opts)?;
    let bad = cells
        .iter()
        .find_map(|c| violation(&pts, &c.witness, None).map(|v| (c, v)));
    match bad {
        None => Ok(Verdict::Yes),
        Some((cell, (i, j, kind))) => Ok(small_witness(&pts, n).unwrap_or_else(|| Verdict::No {
            v: clear_denominators(&cell.witness),
            i,
            j,
            kind,
        })),
    }
}

/// Two-dimensional test: maximizers of `±(x_1 + x_2)` must cover both
/// orderings.
pub fn check_comonotone_2d(set: &FinitePointSet) -> Result<Verdict> {
    if set.dim() != 2 {
        return Err(ComaxError::WrongDimension {
            expected: 2,
            found: set.dim(),
        });
    }
    let pts = exact(set);
    for s in [1, -1] {
        let v = vec![
            <BigRational as Scalar>::from_int(s),
            <BigRational as Scalar>::from_int(s),
        ];
        let m = argmax_indices(&pts, &v);
        for (i, j) in [(0, 1), (1, 0)] {
            if !m.iter().any(|&k| pts[k][i] >= pts[k][j]) {
                return Ok(Verdict::No {
                    v,
                    i,
                    j,
                    kind: ViolationKind::Tie,
                });
            }
        }
    }
    Ok(Verdict::Yes)
}

/// Whether `psi` is a valid permutation mapping for `set`: for every cell
/// witness `v` and every `π` sorting `v`, some maximizer lies in `Z(Ψ(π))`.
pub fn certify_psi(set: &FinitePointSet, psi: &dyn PermutationMapping) -> Result<bool> {
    check_limits(set)?;
    let n = set.dim();
    let pts = exact(set);
    let perms = Permutation::all(n);
    let images: Vec<Permutation> = perms.iter().map(|p| psi.apply(p)).collect();
    for c in cost_cells(&pts, n, &ArrangementOptions::default())? {
        let m = argmax_indices(&pts, &c.witness);
        for (pi, sigma) in perms.iter().zip(&images) {
            if pi.sorts(&c.witness) && !m.iter().any(|&k| sigma.sorts(&pts[k])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Consistency check between certified maps and the standard test: returns `false` only if
/// `psi` is certified for `set`, surjective, and yet `set` fails the
/// standard check.
pub fn check_surjective_psi_implies_standard(
    set: &FinitePointSet,
    psi: &dyn PermutationMapping,
) -> Result<bool> {
    if set.dim() > 4 {
        return Err(ComaxError::PreconditionUnmet(
            "permutation enumeration needs n <= 4".into(),
        ));
    }
    if !is_surjective(psi, set.dim()) || !certify_psi(set, psi)? {
        return Ok(true);
    }
    Ok(check_standard_comonotone(set)?.is_yes())
}

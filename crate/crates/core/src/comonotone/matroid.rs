//! Matroid independence oracles and the greedy permutation mapping.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Permutation, PermutationMapping};
use crate::error::{ComaxError, Result};

/// Which incidence vectors form the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatroidKind {
    IndependentSets,
    Bases,
}

pub trait MatroidOracle: Send + Sync {
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: &[usize]) -> bool;

    fn kind(&self) -> MatroidKind;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformMatroid {
    pub n: usize,
    pub rank: usize,
    pub kind: MatroidKind,
}

impl MatroidOracle for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= self.rank
    }
    fn kind(&self) -> MatroidKind {
        self.kind
    }
}

/// At most `caps[b]` elements from block `b`; `block[i]` is the block of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMatroid {
    pub block: Vec<usize>,
    pub caps: Vec<usize>,
    pub kind: MatroidKind,
}

impl MatroidOracle for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block.len()
    }
    fn is_independent(&self, set: &[usize]) -> bool {
        let mut used = vec![0usize; self.caps.len()];
        for &i in set {
            let b = self.block[i];
            used[b] += 1;
            if used[b] > self.caps[b] {
                return false;
            }
        }
        true
    }
    fn kind(&self) -> MatroidKind {
        self.kind
    }
}

/// Forests of a multigraph; element `i` is edge `edges[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphicMatroid {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub kind: MatroidKind,
}

impl MatroidOracle for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }
    fn is_independent(&self, set: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &e in set {
            let (u, v) = self.edges[e];
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
    fn kind(&self) -> MatroidKind {
        self.kind
    }
}

/// Greedy maximal independent set scanning `order`.
fn greedy(m: &dyn MatroidOracle, order: &[usize]) -> Vec<usize> {
    let mut sel = Vec::new();
    for &e in order {
        sel.push(e);
        if !m.is_independent(&sel) {
            sel.pop();
        }
    }
    sel
}

fn violation(msg: String) -> ComaxError {
    ComaxError::MatroidAxiomViolation(msg)
}

/// Sampled axiom check: the empty set is independent, random greedy chains
/// are hereditary, and random pairs satisfy augmentation.
pub fn validate_matroid(m: &dyn MatroidOracle, samples: usize, seed: u64) -> Result<()> {
    let n = m.ground_size();
    if !m.is_independent(&[]) {
        return Err(violation("empty set is dependent".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ground: Vec<usize> = (0..n).collect();
    let mut random_independent = |rng: &mut ChaCha8Rng| {
        ground.shuffle(rng);
        let mut set = greedy(m, &ground);
        let keep = rng.random_range(0..=set.len());
        set.truncate(keep);
        set
    };
    for _ in 0..samples {
        let mut chain = random_independent(&mut rng);
        chain.shuffle(&mut rng);
        while chain.pop().is_some() {
            if !m.is_independent(&chain) {
                return Err(violation(format!(
                    "subset {chain:?} of an independent set is dependent"
                )));
            }
        }
        let a = random_independent(&mut rng);
        let b = random_independent(&mut rng);
        let (small, large) = if a.len() < b.len() { (a, b) } else { (b, a) };
        if small.len() < large.len() {
            let extends = large.iter().filter(|e| !small.contains(e)).any(|&e| {
                let mut t = small.clone();
                t.push(e);
                m.is_independent(&t)
            });
            if !extends {
                return Err(violation(format!(
                    "{small:?} cannot be augmented from {large:?}"
                )));
            }
        }
    }
    Ok(())
}

/// `Ψ(π)`: elements picked by greedy in order `π` first, then the rest,
/// each group in `π` order.
#[derive(Clone)]
pub struct MatroidPsi {
    oracle: Arc<dyn MatroidOracle>,
}

impl MatroidPsi {
    pub fn oracle(&self) -> &dyn MatroidOracle {
        self.oracle.as_ref()
    }

    pub fn greedy_set(&self, pi: &Permutation) -> Vec<usize> {
        greedy(self.oracle.as_ref(), pi.order())
    }
}

impl PermutationMapping for MatroidPsi {
    fn apply(&self, pi: &Permutation) -> Permutation {
        let sel = self.greedy_set(pi);
        let mut picked = vec![false; pi.len()];
        for &e in &sel {
            picked[e] = true;
        }
        let order = sel
            .iter()
            .copied()
            .chain(pi.order().iter().copied().filter(|&e| !picked[e]))
            .collect();
        Permutation::new(order).expect("greedy output is a permutation")
    }

    fn cost_label(&self) -> &'static str {
        "O(n log n) + n oracle calls"
    }
}

/// Validates `m` on 200 sampled chains and pairs and returns its greedy
/// mapping.
pub fn matroid_psi(m: Arc<dyn MatroidOracle>) -> Result<MatroidPsi> {
    validate_matroid(m.as_ref(), 200, 0x6d61_7472)?;
    Ok(MatroidPsi { oracle: m })
}

/// Maximizer of `vᵀx` over the matroid's feasible incidence vectors:
/// greedy by decreasing `v`, stopping at the first non-positive weight
/// when independent sets are feasible. Returns the sorted support.
pub fn greedy_max_linear(m: &dyn MatroidOracle, v: &[f64]) -> Vec<usize> {
    let pi = Permutation::sorting(v);
    let order: Vec<usize> = match m.kind() {
        MatroidKind::Bases => pi.order().to_vec(),
        MatroidKind::IndependentSets => pi
            .order()
            .iter()
            .copied()
            .take_while(|&i| v[i] > 0.0)
            .collect(),
    };
    let mut sel = greedy(m, &order);
    sel.sort_unstable();
    sel
}

/// Built-in matroids as they appear in configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatroidSpec {
    Uniform(UniformMatroid),
    Partition(PartitionMatroid),
    Graphic(GraphicMatroid),
}

impl MatroidSpec {
    pub fn build(&self) -> Result<Arc<dyn MatroidOracle>> {
        Ok(match self {
            MatroidSpec::Uniform(u) => {
                if u.rank > u.n {
                    return Err(ComaxError::InvalidInput(
                        "uniform rank exceeds ground size".into(),
                    ));
                }
                Arc::new(u.clone())
            }
            MatroidSpec::Partition(p) => {
                if p.block.iter().any(|&b| b >= p.caps.len()) {
                    return Err(ComaxError::InvalidInput(
                        "partition block without a cap".into(),
                    ));
                }
                Arc::new(p.clone())
            }
            MatroidSpec::Graphic(g) => {
                if g.edges
                    .iter()
                    .any(|&(u, v)| u >= g.vertices || v >= g.vertices)
                {
                    return Err(ComaxError::InvalidInput(
                        "edge endpoint out of range".into(),
                    ));
                }
                Arc::new(g.clone())
            }
        })
    }
}

/// Every feasible incidence support, by subset enumeration.
pub fn enumerate_feasible(m: &dyn MatroidOracle) -> Vec<Vec<usize>> {
    let n = m.ground_size();
    let indep: Vec<Vec<usize>> = (0..1usize << n)
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .collect::<Vec<usize>>()
        })
        .filter(|s| m.is_independent(s))
        .collect();
    match m.kind() {
        MatroidKind::IndependentSets => indep,
        MatroidKind::Bases => {
            let rank = indep.iter().map(Vec::len).max().unwrap_or(0);
            indep.into_iter().filter(|s| s.len() == rank).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_based(v).unwrap()
    }

    fn partition() -> PartitionMatroid {
        PartitionMatroid {
            block: vec![0, 0, 1, 1],
            caps: vec![1, 1],
            kind: MatroidKind::Bases,
        }
    }

    fn triangle() -> GraphicMatroid {
        GraphicMatroid {
            vertices: 3,
            edges: vec![(0, 1), (1, 2), (0, 2)],
            kind: MatroidKind::Bases,
        }
    }

    fn fixtures() -> Vec<Arc<dyn MatroidOracle>> {
        vec![
            Arc::new(UniformMatroid {
                n: 5,
                rank: 2,
                kind: MatroidKind::Bases,
            }),
            Arc::new(UniformMatroid {
                n: 4,
                rank: 3,
                kind: MatroidKind::IndependentSets,
            }),
            Arc::new(partition()),
            Arc::new(PartitionMatroid {
                block: vec![0, 1, 0, 2, 1],
                caps: vec![1, 2, 1],
                kind: MatroidKind::IndependentSets,
            }),
            Arc::new(triangle()),
            Arc::new(GraphicMatroid {
                vertices: 4,
                edges: vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
                kind: MatroidKind::IndependentSets,
            }),
        ]
    }

    #[test]
    fn uniform_psi_is_identity_on_natural_order() {
        let m = matroid_psi(Arc::new(UniformMatroid {
            n: 5,
            rank: 3,
            kind: MatroidKind::Bases,
        }))
        .unwrap();
        assert_eq!(m.apply(&Permutation::identity(5)), Permutation::identity(5));
    }

    #[test]
    fn partition_greedy_hand_run() {
        let m = matroid_psi(Arc::new(partition())).unwrap();
        let pi = perm(&[3, 1, 4, 2]);
        let mut sel = m.greedy_set(&pi);
        sel.sort_unstable();
        assert_eq!(sel, vec![0, 2]);
        assert_eq!(m.apply(&pi), pi);
    }

    #[test]
    fn triangle_greedy_matches_spanning_trees() {
        let m = matroid_psi(Arc::new(triangle())).unwrap();
        let pi = perm(&[1, 2, 3]);
        assert_eq!(m.greedy_set(&pi), vec![0, 1]);
        assert_eq!(m.apply(&pi), pi);
        let trees = enumerate_feasible(&triangle());
        assert_eq!(trees, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    struct Broken;
    impl MatroidOracle for Broken {
        fn ground_size(&self) -> usize {
            4
        }
        // Not hereditary: {0,1} is independent but {1} is not.
        fn is_independent(&self, set: &[usize]) -> bool {
            let mut s = set.to_vec();
            s.sort_unstable();
            matches!(s.as_slice(), [] | [0] | [2] | [3] | [0, 1] | [2, 3])
        }
        fn kind(&self) -> MatroidKind {
            MatroidKind::IndependentSets
        }
    }

    #[test]
    fn broken_oracles_are_detected() {
        assert!(matches!(
            matroid_psi(Arc::new(Broken)),
            Err(ComaxError::MatroidAxiomViolation(_))
        ));
    }

    #[test]
    fn greedy_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in fixtures() {
            let feasible = enumerate_feasible(m.as_ref());
            for _ in 0..1000 {
                let v: Vec<f64> = (0..m.ground_size())
                    .map(|_| rng.random_range(-4..=4) as f64)
                    .collect();
                let val = |s: &[usize]| s.iter().map(|&i| v[i]).sum::<f64>();
                let best = feasible
                    .iter()
                    .map(|s| val(s))
                    .fold(f64::NEG_INFINITY, f64::max);
                let g = greedy_max_linear(m.as_ref(), &v);
                assert!(feasible.contains(&g));
                assert_eq!(val(&g), best);
            }
        }
    }

    #[test]
    fn greedy_psi_has_witness_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in fixtures() {
            let psi = matroid_psi(m.clone()).unwrap();
            let n = m.ground_size();
            let feasible = enumerate_feasible(m.as_ref());
            for pi in Permutation::all(n) {
                let sigma = psi.apply(&pi);
                for _ in 0..100 {
                    // A random cost vector sorted by π, with ties.
                    let mut vals: Vec<f64> =
                        (0..n).map(|_| rng.random_range(-3..=3) as f64).collect();
                    vals.sort_by(|a, b| b.total_cmp(a));
                    let mut v = vec![0.0; n];
                    for (k, &i) in pi.order().iter().enumerate() {
                        v[i] = vals[k];
                    }
                    let val = |s: &[usize]| s.iter().map(|&i| v[i]).sum::<f64>();
                    let best = feasible
                        .iter()
                        .map(|s| val(s))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let ok = feasible.iter().any(|s| {
                        let mut x = vec![0.0; n];
                        s.iter().for_each(|&i| x[i] = 1.0);
                        val(s) == best && sigma.sorts(&x)
                    });
                    assert!(ok, "π={pi} Ψ(π)={sigma} v={v:?}");
                }
            }
        }
    }

    #[test]
    fn specs_round_trip() {
        let spec = MatroidSpec::Partition(partition());
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"type\":\"partition\""));
        let back: MatroidSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert!(back.build().is_ok());
        let bad = MatroidSpec::Graphic(GraphicMatroid {
            vertices: 2,
            edges: vec![(0, 2)],
            kind: MatroidKind::Bases,
        });
        assert!(bad.build().is_err());
    }
}

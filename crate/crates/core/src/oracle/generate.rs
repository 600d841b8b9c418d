use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::applications::{Instance, Problem};
use crate::comonotone::{
    GraphicMatroid, MatroidKind, MatroidSpec, PartitionMatroid, UniformMatroid,
};
use crate::error::{ComaxError, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Gaussian,
    Rademacher,
    AdversarialTies,
}

impl std::str::FromStr for Distribution {
    type Err = ComaxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "adversarial-ties" => Ok(Self::AdversarialTies),
            _ => Err(ComaxError::InvalidInput(format!(
                "unknown distribution {s:?}"
            ))),
        }
    }
}

/// Rounds to the nearest multiple of `1e-12`.
pub fn snap(v: f64) -> f64 {
    let t = (v * 1e12).round() / 1e12;
    t + 0.0
}

/// Everything needed to regenerate an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSeed {
    pub seed: u64,
    pub r: usize,
    pub n: usize,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub dist: Distribution,
    /// Fills the problem-specific fields when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
}

impl InstanceSeed {
    pub fn new(seed: u64, r: usize, n: usize, s: usize) -> Self {
        Self {
            seed,
            r,
            n,
            s,
            d: None,
            dist: Distribution::Gaussian,
            problem: None,
        }
    }

    pub fn with_dist(mut self, dist: Distribution) -> Self {
        self.dist = dist;
        self
    }

    pub fn with_problem(mut self, problem: Problem) -> Self {
        self.problem = Some(problem);
        self
    }

    pub fn with_components(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    pub fn generate(&self) -> Result<Instance> {
        let (r, n) = (self.r, self.n);
        if r == 0 || n == 0 || self.s == 0 || self.s > n {
            return Err(ComaxError::InvalidInput(format!(
                "shape r={r}, n={n}, s={} is not valid",
                self.s
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let a = match self.dist {
            Distribution::Gaussian => gaussian_rows(&mut rng, r, n),
            Distribution::Rademacher => (0..r)
                .map(|_| {
                    (0..n)
                        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                        .collect()
                })
                .collect(),
            Distribution::AdversarialTies => {
                let base = adversarial_tie_instance(r, n)?;
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                (0..r)
                    .map(|i| perm.iter().map(|&j| base.get(i, j)).collect())
                    .collect()
            }
        };
        let mut inst = Instance::from_factor(&Matrix::from_rows(&a)?, self.s);
        let Some(problem) = self.problem else {
            inst.d = self.d;
            return Ok(inst);
        };
        if problem.uses_components() {
            inst.d = Some(
                self.d
                    .unwrap_or(if problem == Problem::Spca { 1 } else { 2 }),
            );
        }
        match problem {
            Problem::Tst => inst.a_lin = Some(gaussian_rows(&mut rng, 1, n).remove(0)),
            Problem::DisjointSpca => {
                let d = inst.components();
                inst.s_vec = Some((0..d).map(|_| rng.random_range(1..=self.s)).collect());
            }
            Problem::MatroidConvex | Problem::CustomQuadratic => {
                let g = gaussian_rows(&mut rng, r, r);
                let q: Vec<Vec<f64>> = (0..r)
                    .map(|i| {
                        (0..r)
                            .map(|j| {
                                snap((0..r).map(|k| g[k][i] * g[k][j]).sum::<f64>() / r as f64)
                            })
                            .collect()
                    })
                    .collect();
                inst.q = Some(q);
                inst.b = Some(gaussian_rows(&mut rng, 1, r).remove(0));
                if problem == Problem::MatroidConvex {
                    inst.matroid = Some(random_matroid(&mut rng, n, self.s));
                }
            }
            _ => {}
        }
        Ok(inst)
    }
}

fn gaussian_rows(rng: &mut ChaCha8Rng, r: usize, n: usize) -> Vec<Vec<f64>> {
    (0..r)
        .map(|_| {
            (0..n)
                .map(|_| snap(rng.sample::<f64, _>(StandardNormal)))
                .collect()
        })
        .collect()
}

fn random_matroid(rng: &mut ChaCha8Rng, n: usize, s: usize) -> MatroidSpec {
    let kind = if rng.random::<bool>() {
        MatroidKind::IndependentSets
    } else {
        MatroidKind::Bases
    };
    match rng.random_range(0..3) {
        0 => MatroidSpec::Uniform(UniformMatroid { n, rank: s, kind }),
        1 => {
            let blocks = 2.min(n);
            let block = (0..n).map(|_| rng.random_range(0..blocks)).collect();
            let caps = (0..blocks).map(|_| rng.random_range(1..=s)).collect();
            MatroidSpec::Partition(PartitionMatroid { block, caps, kind })
        }
        _ => {
            let vertices = (n / 2 + 1).max(3);
            let edges = (0..n)
                .map(|_| {
                    let u = rng.random_range(0..vertices);
                    let v = (u + rng.random_range(1..vertices)) % vertices;
                    (u, v)
                })
                .collect();
            MatroidSpec::Graphic(GraphicMatroid {
                vertices,
                edges,
                kind,
            })
        }
    }
}

/// Columns built from a few integer base vectors together with copies and
/// negations of them, so that many pairwise and threshold ties are exact.
///
/// The sequence is `u₀, u₀, −u₀`, then alternately a new base vector and a
/// copy (or, every other time, a negation) of the latest base, where
/// `u_g = (g+1)·e_{g mod r} + e_{(g+1) mod r}` (the second term only when
/// `r > 1`).
pub fn adversarial_tie_instance(r: usize, n: usize) -> Result<Matrix> {
    if n < 3 || r == 0 {
        return Err(ComaxError::InvalidInput(
            "adversarial instances need n ≥ 3 and r ≥ 1".into(),
        ));
    }
    let base = |g: usize| -> Vec<f64> {
        let mut u = vec![0.0; r];
        u[g % r] += (g + 1) as f64;
        if r > 1 {
            u[(g + 1) % r] += 1.0;
        }
        u
    };
    let mut g = 0;
    let mut cols = vec![base(0), base(0), base(0).iter().map(|v| -v).collect()];
    for k in 3..n {
        let step = k - 3;
        if step % 2 == 0 {
            g += 1;
            cols.push(base(g));
        } else if (step / 2) % 2 == 0 {
            cols.push(base(g));
        } else {
            cols.push(base(g).iter().map(|v| -v).collect());
        }
    }
    Ok(Matrix::from_fn(r, n, |i, j| cols[j][i]))
}

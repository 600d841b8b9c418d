//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use comax_core::applications::{solve_problem, tst_oracle, Instance, Problem};
use comax_core::arrangement::{enumerate_cells, ArrangementOptions, Hyperplane};
use comax_core::comonotone::{
    check_comonotone_2d, check_standard_comonotone, enumerate_feasible, matroid_psi,
    FinitePointSet, GraphicMatroid, MatroidKind, MatroidOracle, PartitionMatroid, Permutation,
    PermutationMapping, UniformMatroid, Verdict,
};
use comax_core::numerics::{dot, secular_root, sym_eig, SymMatrix};
use comax_core::oracle::{brute_force_solve, Distribution, InstanceSeed};
use comax_core::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn agree(fw: f64, bf: f64) -> bool {
    (fw - bf).abs() <= 1e-8 * (1.0 + bf.abs())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn c1_checker_fixtures() -> Check {
    let example = FinitePointSet::binary_where(3, |x| x.iter().sum::<f64>() == 2.0)
        .map_err(|e| e.to_string())?;
    let (v, t) = timed(|| check_standard_comonotone(&example));
    ensure(v.map_err(|e| e.to_string())?.is_yes(), || {
        "cardinality-2 slice not YES".into()
    })?;
    ensure(t < Duration::from_secs(1), || {
        format!("cardinality slice took {t:?}")
    })?;

    let fig = FinitePointSet::new(vec![
        vec![1.5, 2.5],
        vec![3.0, 1.0],
        vec![0.3, 1.2],
        vec![1.0, 0.5],
    ])
    .map_err(|e| e.to_string())?;
    let (v, t) = timed(|| check_standard_comonotone(&fig));
    ensure(v.map_err(|e| e.to_string())?.is_yes(), || {
        "four-point planar set not YES".into()
    })?;
    ensure(t < Duration::from_secs(1), || {
        format!("four-point set took {t:?}")
    })?;
    ensure(
        check_comonotone_2d(&fig)
            .map_err(|e| e.to_string())?
            .is_yes(),
        || "planar test disagrees".into(),
    )?;

    let lattice = FinitePointSet::binary_where(3, |x| x[0] >= x[1] && x[1] >= x[2])
        .map_err(|e| e.to_string())?;
    let (v, t) = timed(|| check_standard_comonotone(&lattice));
    let v = v.map_err(|e| e.to_string())?;
    ensure(t < Duration::from_secs(1), || format!("lattice took {t:?}"))?;
    match &v {
        Verdict::No { .. } if v.witness_f64() == Some(vec![-2.0, 3.0, -1.0]) => {}
        other => return Err(format!("lattice verdict {other}")),
    }
    Ok(format!("YES, YES, {v}"))
}

fn matroid_fixtures() -> Vec<Arc<dyn MatroidOracle>> {
    let mut out: Vec<Arc<dyn MatroidOracle>> = Vec::new();
    for kind in [MatroidKind::IndependentSets, MatroidKind::Bases] {
        out.push(Arc::new(UniformMatroid {
            n: 5,
            rank: 2,
            kind,
        }));
        out.push(Arc::new(PartitionMatroid {
            block: vec![0, 0, 1, 1, 2, 2],
            caps: vec![1, 2, 1],
            kind,
        }));
        out.push(Arc::new(GraphicMatroid {
            vertices: 4,
            edges: vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (1, 3)],
            kind,
        }));
    }
    out
}

fn c2_property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc2);
    let trials = 10_000;
    for t in 0..trials {
        let n = rng.random_range(1..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        let order = {
            let mut o: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(o.as_mut_slice(), &mut rng);
            o
        };
        let pi = Permutation::new(order).map_err(|e| e.to_string())?;
        let lhs = dot(&pi.arrange(&v), &pi.arrange(&x));
        ensure(lhs >= dot(&v, &x), || {
            format!("rearrangement violated at trial {t}")
        })?;
    }

    let fixtures = matroid_fixtures();
    let feasible: Vec<Vec<Vec<f64>>> = fixtures
        .iter()
        .map(|m| {
            enumerate_feasible(m.as_ref())
                .into_iter()
                .map(|s| {
                    let mut x = vec![0.0; m.ground_size()];
                    s.iter().for_each(|&i| x[i] = 1.0);
                    x
                })
                .collect()
        })
        .collect();
    let psis: Vec<_> = fixtures
        .iter()
        .map(|m| matroid_psi(m.clone()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for t in 0..trials {
        let k = t % fixtures.len();
        let n = fixtures[k].ground_size();
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let pi = Permutation::new(order).map_err(|e| e.to_string())?;
        // v ∈ Z(π): decreasing values along π, with occasional ties.
        let mut vals: Vec<f64> = (0..n).map(|_| rng.random_range(-3..=3) as f64).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        let mut v = vec![0.0; n];
        for (pos, &i) in pi.order().iter().enumerate() {
            v[i] = vals[pos];
        }
        let sigma = psis[k].apply(&pi);
        let best = feasible[k]
            .iter()
            .map(|x| dot(&v, x))
            .fold(f64::MIN, f64::max);
        let ok = feasible[k]
            .iter()
            .any(|x| dot(&v, x) == best && sigma.sorts(x));
        ensure(ok, || {
            format!("no maximizer in Z(Ψ(π)) for fixture {k}, π = {pi}, v = {v:?}")
        })?;
    }
    Ok(format!(
        "{trials} rearrangement trials, {trials} Ψ-witness trials"
    ))
}

#[derive(Clone, Copy)]
struct Case {
    problem: Problem,
    d: Option<usize>,
    label: &'static str,
}

const CASES: [Case; 6] = [
    Case {
        problem: Problem::SingleSpca,
        d: None,
        label: "single-spca",
    },
    Case {
        problem: Problem::NnSpca,
        d: None,
        label: "nn-spca",
    },
    Case {
        problem: Problem::Tst,
        d: None,
        label: "2st",
    },
    Case {
        problem: Problem::Spca,
        d: Some(1),
        label: "spca(d=1)",
    },
    Case {
        problem: Problem::Spca,
        d: Some(0),
        label: "spca(d=r)",
    },
    Case {
        problem: Problem::MatroidConvex,
        d: None,
        label: "matroid-convex",
    },
];

fn case_instance(
    case: Case,
    k: usize,
    dist: Distribution,
) -> Result<(InstanceSeed, Instance), String> {
    let r = 1 + k % 3;
    let n = 6 + (k / 3) % 5;
    let s = 2 + (k / 15) % 2;
    let mut seed = InstanceSeed::new(1000 * (case.label.len() as u64) + k as u64, r, n, s)
        .with_dist(dist)
        .with_problem(case.problem);
    if let Some(d) = case.d {
        seed = seed.with_components(if d == 0 { r } else { d });
    }
    let inst = seed.generate().map_err(|e| e.to_string())?;
    Ok((seed, inst))
}

/// Framework reports for the suite, one JSON line per instance.
fn framework_reports(
    count: usize,
    dist: Distribution,
    cfg: &SolverConfig,
) -> Result<String, String> {
    let mut out = String::new();
    for case in CASES {
        for k in 0..count {
            let (seed, inst) = case_instance(case, k, dist)?;
            let fw = solve_problem(case.problem, &inst, cfg)
                .map_err(|e| format!("{} #{k}: {e}", case.label))?;
            let mut report = fw.report;
            report.wall_ms = None;
            let line = serde_json::json!({
                "case": case.label,
                "seed": seed,
                "solution": fw.solution,
                "report": report,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
    }
    Ok(out)
}

fn equality_suite(count: usize, dist: Distribution) -> Result<(String, usize), String> {
    let cfg = SolverConfig::default();
    let mut worst = 0.0_f64;
    let mut checked = 0;
    for case in CASES {
        for k in 0..count {
            let (_, inst) = case_instance(case, k, dist)?;
            let fw = solve_problem(case.problem, &inst, &cfg)
                .map_err(|e| format!("{} #{k}: {e}", case.label))?;
            let bf = brute_force_solve(case.problem, &inst, &cfg)
                .map_err(|e| format!("{} #{k}: {e}", case.label))?;
            let (a, b) = (fw.solution.value, bf.value);
            ensure(agree(a, b), || {
                format!("{} #{k}: framework {a} vs brute force {b}", case.label)
            })?;
            worst = worst.max((a - b).abs() / (1.0 + b.abs()));
            checked += 1;
        }
    }
    Ok((format!("worst relative gap {worst:.2e}"), checked))
}

fn c3_framework_vs_oracle() -> Check {
    let (res, t) = timed(|| equality_suite(200, Distribution::Gaussian));
    let (gap, checked) = res?;
    ensure(t < Duration::from_secs(600), || format!("suite took {t:?}"))?;
    Ok(format!(
        "{checked} instances, {gap}, {:.1} s",
        t.as_secs_f64()
    ))
}

fn c4_disjoint() -> Check {
    let cfg = SolverConfig::default();
    let start = Instant::now();
    let fixture = Instance {
        d: Some(2),
        s_vec: Some(vec![1, 1]),
        ..Instance::from_factor(
            &comax_core::numerics::Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap(),
            1,
        )
    };
    let v = solve_problem(Problem::DisjointSpca, &fixture, &cfg).map_err(|e| e.to_string())?;
    ensure(agree(v.solution.value, 5.0), || {
        format!("fixture value {}", v.solution.value)
    })?;
    for k in 0..50u64 {
        let n = 3 + (k % 3) as usize;
        let inst = InstanceSeed::new(500 + k, 1, n, n)
            .with_problem(Problem::DisjointSpca)
            .with_components(2)
            .generate()
            .map_err(|e| e.to_string())?;
        let caps = inst.s_vec.clone().unwrap();
        let fw =
            solve_problem(Problem::DisjointSpca, &inst, &cfg).map_err(|e| format!("#{k}: {e}"))?;
        let bf = brute_force_solve(Problem::DisjointSpca, &inst, &cfg)
            .map_err(|e| format!("#{k}: {e}"))?;
        ensure(agree(fw.solution.value, bf.value), || {
            format!(
                "#{k} caps {caps:?}: framework {} vs brute force {}",
                fw.solution.value, bf.value
            )
        })?;
        let labels = fw.solution.assignment.clone().unwrap_or_default();
        ensure(labels.len() == n, || format!("#{k}: assignment length"))?;
        for (j, &cap) in caps.iter().enumerate() {
            ensure(labels.iter().filter(|&&l| l == j).count() <= cap, || {
                format!("#{k}: cap {j} violated")
            })?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!(
        "fixture 5, 50 instances agree, {:.1} s",
        t.as_secs_f64()
    ))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn c5_exponents() -> Check {
    let cfg = SolverConfig::default();
    let r = 2;
    let ns = [6usize, 8, 10, 12, 14];
    let regimes = [
        (Problem::MatroidConvex, "general", 2 * r as u32),
        (Problem::CustomQuadratic, "standard", r as u32 + 1),
        (Problem::NnSpca, "nonneg", r as u32),
        (Problem::SingleSpca, "signinv", r as u32),
    ];
    let mut parts = Vec::new();
    for (problem, name, exp) in regimes {
        let mut counts = Vec::new();
        for &n in &ns {
            let mut total = 0.0;
            for seed in 0..3 {
                let mut inst = InstanceSeed::new(7000 + seed, r, n, n / 2)
                    .with_problem(problem)
                    .generate()
                    .map_err(|e| e.to_string())?;
                if problem == Problem::MatroidConvex {
                    inst.matroid = Some(comax_core::comonotone::MatroidSpec::Uniform(
                        UniformMatroid {
                            n,
                            rank: n / 2,
                            kind: MatroidKind::IndependentSets,
                        },
                    ));
                }
                let out = solve_problem(problem, &inst, &cfg)
                    .map_err(|e| format!("{name} n={n}: {e}"))?;
                ensure(out.report.regime == name, || {
                    format!("{problem} ran in {}", out.report.regime)
                })?;
                ensure(out.report.rank == r, || {
                    format!("{problem} has objective rank {}", out.report.rank)
                })?;
                total += out.report.candidate_count as f64;
            }
            counts.push(total / 3.0);
        }
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let b = slope(&xs, &counts);
        let limit = exp as f64 + 0.5;
        ensure(b <= limit, || format!("{name}: slope {b:.2} > {limit}"))?;
        parts.push(format!("{name} {b:.2} ≤ {limit}"));
    }
    Ok(parts.join(", "))
}

fn c6_arrangements() -> Check {
    let opts = ArrangementOptions::default();
    let err = |e: comax_core::ComaxError| e.to_string();
    let central = [
        Hyperplane::central(vec![1.0, 0.0]),
        Hyperplane::central(vec![0.0, 1.0]),
        Hyperplane::central(vec![1.0, 1.0]),
    ];
    let c = enumerate_cells(&central, 2, 2, &opts).map_err(err)?.len();
    ensure(c == 13, || format!("central lines: {c} cells"))?;
    let general = [
        Hyperplane::new(vec![1.0, 0.0], 0.0),
        Hyperplane::new(vec![0.0, 1.0], 0.0),
        Hyperplane::new(vec![1.0, 1.0], 1.0),
        Hyperplane::new(vec![1.0, -2.0], 0.5),
    ];
    let g = enumerate_cells(&general, 2, 0, &opts).map_err(err)?.len();
    ensure(g == 11, || format!("general lines: {g} regions"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xc6);
    for t in 0..500 {
        let q = rng.random_range(1..=3);
        let p = rng.random_range(1..=8);
        let central = rng.random::<bool>();
        let planes: Vec<Hyperplane> = (0..p)
            .map(|_| {
                let nrm: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..1.0)).collect();
                let b = if central {
                    0.0
                } else {
                    rng.random_range(-1.0..1.0)
                };
                Hyperplane::new(nrm, b)
            })
            .collect();
        let cells: std::collections::HashSet<Vec<i8>> = enumerate_cells(&planes, q, 0, &opts)
            .map_err(err)?
            .into_iter()
            .map(|c| c.signs)
            .collect();
        for _ in 0..1000 {
            let z: Vec<f64> = (0..q).map(|_| rng.random_range(-5.0..5.0)).collect();
            let s: Vec<i8> = planes.iter().map(|h| h.sign_at(&z, 1e-9)).collect();
            if s.iter().all(|&v| v != 0) {
                ensure(cells.contains(&s), || {
                    format!("arrangement {t}: sampled {s:?} missing")
                })?;
            }
        }
    }
    Ok("13 cells, 11 regions, 500 random arrangements complete".into())
}

fn c7_numerics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc7);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let entries: Vec<f64> = (0..n * n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let m = SymMatrix::from_fn(n, |i, j| entries[i.min(j) * n + i.max(j)]);
        let e = sym_eig(&m).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n)
                    .map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j])
                    .sum();
                worst = worst.max((rec - m.get(i, j)).abs());
            }
        }
    }
    ensure(worst <= 1e-8, || {
        format!("reconstruction error {worst:.2e}")
    })?;

    let mu = secular_root(&[2.0, 1.0], &[0.2, 0.0], 1e-13).map_err(|e| e.to_string())?;
    ensure((mu - 2.1).abs() <= 1e-9, || format!("secular root {mu}"))?;

    let fixtures: [(Vec<Vec<f64>>, Vec<f64>); 4] = [
        (vec![vec![2.0, 0.0], vec![0.0, 1.0]], vec![0.2, 0.0]),
        (vec![vec![1.0, 0.3], vec![0.3, -0.5]], vec![0.4, -0.7]),
        (
            vec![
                vec![2.0, 0.5, 0.0],
                vec![0.5, 1.0, 0.2],
                vec![0.0, 0.2, -1.0],
            ],
            vec![0.3, -0.1, 0.6],
        ),
        (
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.5],
            ],
            vec![0.0, 0.0, 0.3],
        ),
    ];
    let mut gap = 0.0_f64;
    for (sig, lin) in &fixtures {
        let sigma = SymMatrix::new(sig).map_err(|e| e.to_string())?;
        let n = lin.len();
        let supp: Vec<usize> = (0..n).collect();
        let exact = tst_oracle(&sigma, lin, n, &supp, 1e-13)
            .map_err(|e| e.to_string())?
            .value;
        let mut sampled = f64::MIN;
        for _ in 0..1_000_000 {
            let mut x: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let norm = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
            sampled = sampled.max(sigma.quad_form(&x) + dot(lin, &x));
        }
        ensure(sampled <= exact + 1e-12, || {
            format!("sampling beat the solver: {sampled} > {exact}")
        })?;
        gap = gap.max(exact - sampled);
    }
    ensure(gap <= 1e-4, || format!("sphere sampling gap {gap:.2e}"))?;
    Ok(format!(
        "reconstruction {worst:.1e}, μ* = {mu}, sampling gap {gap:.1e}"
    ))
}

fn c8_adversarial() -> Check {
    let (res, t) = timed(|| equality_suite(30, Distribution::AdversarialTies));
    let (gap, checked) = res?;
    Ok(format!(
        "{checked} tie instances, {gap}, {:.1} s",
        t.as_secs_f64()
    ))
}

fn c9_determinism() -> Check {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for threads in [1usize, 8] {
        let cfg = SolverConfig::default().with_threads(threads);
        let text = framework_reports(200, Distribution::Gaussian, &cfg)?;
        let path = dir.join(format!("reports-{threads}t.jsonl"));
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], || {
        "reports differ between 1 and 8 threads".into()
    })?;
    Ok(format!("{} identical bytes", files[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("1 checker fixtures", c1_checker_fixtures),
        ("2 rearrangement and Ψ-witness suites", c2_property_suites),
        ("3 framework equals brute force", c3_framework_vs_oracle),
        ("4 disjoint SPCA", c4_disjoint),
        ("5 candidate-count exponents", c5_exponents),
        ("6 arrangement counts", c6_arrangements),
        ("7 numerics", c7_numerics),
        ("8 adversarial ties", c8_adversarial),
        ("9 thread determinism", c9_determinism),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

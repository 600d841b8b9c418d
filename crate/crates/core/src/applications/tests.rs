use super::*;
use crate::comonotone::{enumerate_feasible, MatroidKind, UniformMatroid};
use crate::config::Tolerances;
use crate::framework::OracleOutcome;
use crate::numerics::leading_eigenpair;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn row(v: &[f64]) -> Matrix {
    Matrix::from_rows(&[v.to_vec()]).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, n: usize) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..r)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

fn subsets(n: usize, cap: usize) -> Vec<Vec<usize>> {
    (1..1usize << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.len() <= cap)
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * (1.0 + b.abs())
}

#[test]
fn single_spca_fixture() {
    let out = spca_single_solve(&row(&[3.0, -1.0, 2.0]), 2, &cfg()).unwrap();
    assert!(close(out.solution.value, 13.0));
    assert_eq!(out.solution.support, vec![0, 2]);
    assert_eq!(out.report.regime, "signinv");
}

#[test]
fn single_spca_with_one_nonzero_picks_largest_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_matrix(&mut rng, 2, 7);
    let sigma = a.gram();
    let best = (0..7).map(|i| sigma.get(i, i)).fold(f64::MIN, f64::max);
    let out = spca_single_solve(&a, 1, &cfg()).unwrap();
    assert!(close(out.solution.value, best));
}

#[test]
fn single_spca_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 2, 7);
        let sigma = a.gram();
        let bf = subsets(7, 3)
            .iter()
            .map(|s| leading_eigenpair(&sigma.principal(s)).unwrap().0)
            .fold(f64::MIN, f64::max);
        let out = spca_single_solve(&a, 3, &cfg()).unwrap();
        assert!(
            close(out.solution.value, bf),
            "{} vs {bf}",
            out.solution.value
        );
    }
}

#[test]
fn nn_oracle_positive_top_eigenvector() {
    let sigma = SymMatrix::new(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
    let OracleOutcome::Attained(s) =
        nn_spca_oracle(&sigma, 2, &[0, 1], &Tolerances::default()).unwrap()
    else {
        panic!("expected attainment");
    };
    assert!(close(s.value, 1.5));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s.x[0] - h).abs() < 1e-9 && (s.x[1] - h).abs() < 1e-9);
}

#[test]
fn nn_oracle_falls_to_lower_eigenspace() {
    let sigma = SymMatrix::new(&[vec![1.0, -0.5], vec![-0.5, 1.0]]).unwrap();
    let OracleOutcome::Attained(s) =
        nn_spca_oracle(&sigma, 2, &[0, 1], &Tolerances::default()).unwrap()
    else {
        panic!("expected attainment");
    };
    assert!(close(s.value, 0.5));
    assert!(s.x.iter().all(|&v| v > 0.0));
}

#[test]
fn nn_oracle_singleton_is_coordinate_vector() {
    let sigma = SymMatrix::new(&[vec![2.0, -0.5], vec![-0.5, 1.0]]).unwrap();
    let OracleOutcome::Attained(s) =
        nn_spca_oracle(&sigma, 1, &[1], &Tolerances::default()).unwrap()
    else {
        panic!("expected attainment");
    };
    assert_eq!(s.x, vec![0.0, 1.0]);
    assert!(close(s.value, 1.0));
}

#[test]
fn nn_oracle_reports_fallback_without_positive_eigenvector() {
    // Orthogonal blocks: every eigenvector vanishes on part of the support.
    let sigma = SymMatrix::new(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
    match nn_spca_oracle(&sigma, 2, &[0, 1], &Tolerances::default()).unwrap() {
        OracleOutcome::NotAttained { fallback: Some(f) } => {
            assert_eq!(f.x, vec![1.0, 0.0]);
            assert!(close(f.value, 2.0));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn nn_spca_prefers_singleton_on_negative_correlation() {
    let sigma = SymMatrix::new(&[vec![1.0, -0.5], vec![-0.5, 1.0]]).unwrap();
    let a = factor_covariance(&sigma, 1e-9).unwrap();
    assert_eq!(a.rows(), 2);
    let out = nn_spca_solve(&a, 2, &cfg()).unwrap();
    assert!(close(out.solution.value, 1.0));
    assert_eq!(out.solution.support.len(), 1);
}

#[test]
fn nn_spca_equals_single_on_nonnegative_gram() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let rows: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..6).map(|_| rng.random_range(0.1..1.0)).collect())
            .collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let nn = nn_spca_solve(&a, 3, &cfg()).unwrap().solution.value;
        let single = spca_single_solve(&a, 3, &cfg()).unwrap().solution.value;
        assert!(close(nn, single));
    }
}

#[test]
fn tst_oracle_closed_form() {
    let sigma = SymMatrix::diagonal(&[2.0, 1.0]);
    let s = tst_oracle(&sigma, &[0.2, 0.0], 2, &[0, 1], 1e-12).unwrap();
    assert!(close(s.value, 2.2));
    assert!((s.x[0] - 1.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);
}

#[test]
fn tst_oracle_singleton_takes_better_sign() {
    let sigma = SymMatrix::diagonal(&[2.0, 1.0]);
    let s = tst_oracle(&sigma, &[-0.7, 0.0], 1, &[0], 1e-12).unwrap();
    assert!(close(s.value, 2.7));
    assert_eq!(s.x[0], -1.0);
}

#[test]
fn tst_oracle_hard_case_uses_top_eigenvector() {
    let sigma = SymMatrix::diagonal(&[2.0, 1.0]);
    let s = tst_oracle(&sigma, &[0.0, 0.4], 2, &[0, 1], 1e-12).unwrap();
    // μ = 2, x₂ = 0.2/(2−1) = 0.2, x₁ = √0.96.
    assert!(close(s.value, 2.0 * 0.96 + 0.04 + 0.4 * 0.2));
    assert!((s.x[1] - 0.2).abs() < 1e-9);
}

#[test]
fn tst_with_zero_linear_term_is_single_spca() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_matrix(&mut rng, 2, 6);
    let t = tst_solve(&a, &[0.0; 6], 2, &cfg()).unwrap().solution.value;
    let s = spca_single_solve(&a, 2, &cfg()).unwrap().solution.value;
    assert!(close(t, s));
}

#[test]
fn tst_huge_linear_term_picks_top_entries() {
    let a = row(&[0.3, -0.5, 0.2, 0.4, -0.1]);
    let scale = 1e3 * 0.55;
    let lin: Vec<f64> = [0.1, -0.9, 0.5, 0.2, 0.7]
        .iter()
        .map(|v| v * scale)
        .collect();
    let out = tst_solve(&a, &lin, 2, &cfg()).unwrap();
    assert_eq!(out.solution.support, vec![1, 4]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tst_oracle_kkt(seed in 0u64..10_000, m in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 3, m);
        let sigma = a.gram();
        let lin: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let supp: Vec<usize> = (0..m).collect();
        let s = tst_oracle(&sigma, &lin, m, &supp, 1e-13).unwrap();
        let x = &s.x;
        prop_assert!((crate::numerics::norm2(x) - 1.0).abs() <= 1e-10);
        // μ from the stationarity condition Σx + b/2 = μx.
        let sx = sigma.mul_vec(x);
        let mu = crate::numerics::dot(x, &sx) + crate::numerics::dot(&lin, x) / 2.0;
        let top = leading_eigenpair(&sigma).unwrap().0;
        prop_assert!(mu >= top - 1e-10);
        let res: f64 = (0..m)
            .map(|i| (mu * x[i] - sx[i] - lin[i] / 2.0).powi(2))
            .sum::<f64>()
            .sqrt();
        prop_assert!(res <= 1e-7, "residual {res}");
    }
}

#[test]
fn multi_spca_full_rank_is_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = random_matrix(&mut rng, 2, 7);
    let mut norms: Vec<f64> = (0..7)
        .map(|i| crate::numerics::dot(&a.column(i), &a.column(i)))
        .collect();
    norms.sort_by(|x, y| y.total_cmp(x));
    let out = spca_multi_solve(&a, 3, 2, &cfg()).unwrap();
    assert!(close(out.solution.value, norms[..3].iter().sum()));
}

#[test]
fn multi_spca_one_component_is_single() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let a = random_matrix(&mut rng, 2, 7);
    let m = spca_multi_solve(&a, 3, 1, &cfg()).unwrap().solution.value;
    let s = spca_single_solve(&a, 3, &cfg()).unwrap().solution.value;
    assert!(close(m, s));
}

#[test]
fn multi_spca_rejects_too_many_components() {
    let a = row(&[1.0, 2.0]);
    assert!(matches!(
        spca_multi_solve(&a, 1, 2, &cfg()),
        Err(ComaxError::PreconditionUnmet(_))
    ));
}

fn disjoint_brute(a: &Matrix, d: usize, caps: &[usize]) -> f64 {
    let n = a.cols();
    let mut best = f64::MIN;
    for code in 0..(d + 1).pow(n as u32) {
        let labels: Vec<usize> = (0..n)
            .map(|i| code / (d + 1).pow(i as u32) % (d + 1))
            .collect();
        let z = DisjointAssignment::new(d, labels).unwrap();
        if z.respects(caps) {
            best = best.max(disjoint_value(a, &z).unwrap());
        }
    }
    best
}

#[test]
fn disjoint_two_column_fixture() {
    let out = disjoint_spca_solve(&row(&[1.0, 2.0]), 2, &[1, 1], &cfg()).unwrap();
    assert!(close(out.solution.value, 5.0));
    let z = DisjointAssignment::new(2, out.solution.assignment.clone().unwrap()).unwrap();
    assert_eq!(z.components(), vec![vec![1], vec![0]]);
}

#[test]
fn disjoint_matches_assignment_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for caps in [[2usize, 1], [1, 1], [3, 2]] {
        let a = random_matrix(&mut rng, 1, 5);
        let out = disjoint_spca_solve(&a, 2, &caps, &cfg()).unwrap();
        let z = DisjointAssignment::new(2, out.solution.assignment.clone().unwrap()).unwrap();
        assert!(z.respects(&caps));
        assert!(close(out.solution.value, disjoint_brute(&a, 2, &caps)));
    }
}

#[test]
fn disjoint_one_component_is_binary_single_spca() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let a = random_matrix(&mut rng, 1, 5);
    let dj = disjoint_spca_solve(&a, 1, &[2], &cfg())
        .unwrap()
        .solution
        .value;
    let single = spca_single_solve(&a, 2, &cfg()).unwrap().solution.value;
    assert!(close(dj, single));
}

#[test]
fn disjoint_rank_three_exceeds_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let a = random_matrix(&mut rng, 3, 4);
    assert!(matches!(
        disjoint_spca_solve(&a, 2, &[1, 1], &cfg()),
        Err(ComaxError::BudgetExceeded { .. })
    ));
}

#[test]
fn disjoint_assignment_matrix_rows_sum_to_one() {
    let z = DisjointAssignment::new(2, vec![2, 0, 1, 0]).unwrap();
    assert!(z
        .z()
        .iter()
        .all(|r| r.iter().map(|&v| v as usize).sum::<usize>() == 1));
    assert_eq!(z.components(), vec![vec![1, 3], vec![2]]);
    assert!(z.respects(&[2, 1]) && !z.respects(&[1, 1]));
    assert!(DisjointAssignment::new(2, vec![3]).is_err());
}

#[test]
fn matroid_convex_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for kind in [MatroidKind::IndependentSets, MatroidKind::Bases] {
        let a = random_matrix(&mut rng, 2, 6);
        let q = SymMatrix::new(&[vec![1.0, 0.2], vec![0.2, 0.5]]).unwrap();
        let b = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let m: Arc<dyn crate::comonotone::MatroidOracle> = Arc::new(UniformMatroid {
            n: 6,
            rank: 3,
            kind,
        });
        let bf = enumerate_feasible(m.as_ref())
            .iter()
            .map(|s| {
                let mut x = vec![0.0; 6];
                s.iter().for_each(|&i| x[i] = 1.0);
                let y = a.mul_vec(&x);
                q.quad_form(&y) + crate::numerics::dot(&b, &y)
            })
            .fold(f64::MIN, f64::max);
        let out = matroid_convex_solve(&a, q, b, m, &cfg()).unwrap();
        assert!(
            close(out.solution.value, bf),
            "{kind:?}: {} vs {bf}",
            out.solution.value
        );
        assert_eq!(out.report.regime, "general");
    }
}

#[test]
fn custom_quadratic_identity_is_single_spca() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let a = random_matrix(&mut rng, 2, 6);
    let q = SymMatrix::diagonal(&[1.0, 1.0]);
    let c = custom_quadratic_solve(&a, q, vec![0.0, 0.0], 2, &cfg())
        .unwrap()
        .solution
        .value;
    let s = spca_single_solve(&a, 2, &cfg()).unwrap().solution.value;
    assert!(close(c, s));
}

#[test]
fn rank_deficient_factor_is_compressed() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0, -1.0], vec![2.0, 4.0, -2.0]]).unwrap();
    let out = spca_single_solve(&a, 1, &cfg()).unwrap();
    assert!(close(out.solution.value, 20.0));
    assert_eq!(out.report.rank, 1);
}

#[test]
fn covariance_factor_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let a = random_matrix(&mut rng, 3, 5);
    let sigma = covariance(&a);
    let f = factor_covariance(&sigma, 1e-9).unwrap();
    assert_eq!(f.rows(), 3);
    let back = f.gram();
    for i in 0..5 {
        for j in 0..5 {
            assert!((back.get(i, j) - sigma.get(i, j)).abs() < 1e-10);
        }
    }
}

#[test]
fn problem_names_round_trip() {
    for p in Problem::ALL {
        assert_eq!(p.name().parse::<Problem>().unwrap(), p);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            format!("\"{}\"", p.name())
        );
    }
    assert!("spca-2".parse::<Problem>().is_err());
}

#[test]
fn instance_validation() {
    let mut inst = Instance::from_factor(&row(&[1.0, 2.0, 3.0]), 2);
    assert!(inst.validate(Problem::SingleSpca).is_ok());
    assert!(inst.validate(Problem::Tst).is_err());
    inst.a_lin = Some(vec![0.0; 3]);
    assert!(inst.validate(Problem::Tst).is_ok());
    inst.d = Some(1);
    assert!(inst.validate(Problem::SingleSpca).is_err());
    assert!(inst.validate(Problem::Spca).is_ok());
    inst.s = 4;
    assert!(inst.validate(Problem::Spca).is_err());
}

#[test]
fn instance_reads_sigma() {
    let json = r#"{"Sigma": [[1.0, 0.5], [0.5, 1.0]], "s": 1}"#;
    let inst: Instance = serde_json::from_str(json).unwrap();
    let out = solve_problem(Problem::SingleSpca, &inst, &cfg()).unwrap();
    assert!(close(out.solution.value, 1.0));
    let back: Instance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
    assert_eq!(back, inst);
}

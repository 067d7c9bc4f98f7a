use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qql::bounds::{is_feasible, m_sum, BoundQuery};
use qql::linalg::CVector;
use qql::optimizer::{
    evaluate, objective, optimize, pretty_good_measurement, OptimizerConfig, ParamAlgorithm,
};
use qql::oracle::{chi, chi_bits, BooleanFunction, FamilyKind, FunctionFamily, SubsetMask};
use qql::poly::extract_polynomials;
use qql::random::{random_algorithm, random_family, random_measurement, random_polynomial};
use qql::reference::{build_character_distinguisher, build_uniform_subset_algorithm};
use qql::report::RunReport;
use qql::simulator::{Picture, Space};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn character_orthogonality_exhaustive() {
    // sum_F chi(S,F) chi(T,F) = sum_F chi(S xor T, F)
    for n in 1..=12u32 {
        let size = 1u64 << n;
        for u in 0..size {
            let total: i64 = (0..size).map(|f| i64::from(chi_bits(u, f))).sum();
            let expected = if u == 0 { size as i64 } else { 0 };
            assert_eq!(total, expected, "N = {n}, S xor T = {u:b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distinct_subsets_are_orthogonal(n in 1u32..=12, s in any::<u64>(), t in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (s, t) = (SubsetMask(s & mask), SubsetMask(t & mask));
        let mut total = 0i64;
        let mut square = 0i64;
        for f in BooleanFunction::all(n).unwrap() {
            total += i64::from(chi(s, &f).unwrap() * chi(t, &f).unwrap());
            square += i64::from(chi(s, &f).unwrap().pow(2));
        }
        prop_assert_eq!(square, 1i64 << n);
        prop_assert_eq!(total, if s == t { 1i64 << n } else { 0 });
    }

    #[test]
    fn oracle_is_an_involution(seed in any::<u64>(), n in 1u32..=5, w in 1usize..=3, bitflip in any::<bool>()) {
        let mut r = rng(seed);
        let picture = if bitflip { Picture::BitFlip } else { Picture::Phase };
        let space = Space::new(picture, n, w).unwrap();
        let mut v = qql::linalg::random_state(&mut r, space.dim());
        let original = v.clone();
        let f = qql::random::random_function(&mut r, n).unwrap();
        space.apply_oracle(v.as_mut_slice(), &f).unwrap();
        space.apply_oracle(v.as_mut_slice(), &f).unwrap();
        prop_assert!((v - original).norm() < 1e-14);
    }

    #[test]
    fn runs_preserve_norm(seed in any::<u64>(), n in 1u32..=4, k in 1usize..=3) {
        let mut r = rng(seed);
        let space = Space::new(Picture::BitFlip, n, 2).unwrap();
        let alg = random_algorithm(&mut r, space, k).unwrap();
        let f = qql::random::random_function(&mut r, n).unwrap();
        for state in alg.trace(&f).unwrap() {
            prop_assert!((state.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval_identity(seed in any::<u64>(), n in 1u32..=12, k_frac in 0.0f64..=1.0) {
        let k = ((f64::from(n) * k_frac).round() as u32).min(n);
        let q = random_polynomial(&mut rng(seed), n, k).unwrap();
        let exhaustive = q.exhaustive_norm_sqr().unwrap();
        let predicted = q.parseval() * (1u64 << n) as f64;
        prop_assert!((exhaustive - predicted).abs() <= 1e-12 * predicted);
    }

    #[test]
    fn extracted_polynomials_conserve_probability(seed in any::<u64>(), n in 1u32..=5, k in 1usize..=3) {
        let mut r = rng(seed);
        let space = Space::new(Picture::Phase, n, 1).unwrap();
        let alg = random_algorithm(&mut r, space, k).unwrap();
        let outcomes = r.random_range(1..=space.dim());
        let m = random_measurement(&mut r, space.dim(), outcomes).unwrap();
        let ex = extract_polynomials(&alg, &m).unwrap();
        prop_assert!((ex.total_parseval() - 1.0).abs() < 1e-12);
        prop_assert!(ex.degree_certified());
    }

    #[test]
    fn picture_conversion_keeps_success(seed in any::<u64>(), n in 1u32..=3, k in 1usize..=2) {
        let mut r = rng(seed);
        let space = Space::new(Picture::BitFlip, n, 1).unwrap();
        let alg = random_algorithm(&mut r, space, k).unwrap();
        let fam = FunctionFamily::make(FamilyKind::All { domain_size: n }).unwrap();
        let size = fam.len().min(space.dim());
        let fam = FunctionFamily::new(fam.members()[..size].to_vec()).unwrap();
        let m = random_measurement(&mut r, space.dim(), size).unwrap();
        let c = space.conversion_matrix(Picture::Phase).unwrap();
        let a = qql::simulator::success_matrix(&alg, &m, &fam).unwrap();
        let b = qql::simulator::success_matrix(
            &alg.convert_picture(Picture::Phase).unwrap(),
            &m.transformed(&c).unwrap(),
            &fam,
        ).unwrap();
        prop_assert!(a.max_deviation(&b) < 1e-12);
        let back = alg.convert_picture(Picture::Phase).unwrap().convert_picture(Picture::BitFlip).unwrap();
        let c2 = qql::simulator::success_matrix(&back, &m, &fam).unwrap();
        prop_assert!(a.max_deviation(&c2) < 1e-12);
    }

    #[test]
    fn m_sum_strictly_increasing(n in 1u64..=64) {
        for k in 0..n {
            prop_assert!(m_sum(n, k).unwrap() < m_sum(n, k + 1).unwrap());
        }
        prop_assert!(m_sum(n, n + 1).is_err());
    }

    #[test]
    fn feasibility_is_monotone(n in 1u64..=20, k in 0u64..=20, d in 1u64..=5000, num in 1u64..=100, den in 1u64..=100) {
        let k = k.min(n);
        prop_assume!(num <= den);
        let p = BigRational::new(num.into(), den.into());
        let feasible = |k, d: u64, p: &BigRational| {
            is_feasible(&BoundQuery::new(n, k, p.clone(), BigUint::from(d)).unwrap()).unwrap()
        };
        let here = feasible(k, d, &p);
        if here {
            if k < n { prop_assert!(feasible(k + 1, d, &p)); }
            if d > 1 { prop_assert!(feasible(k, d - 1, &p)); }
            if num > 1 { prop_assert!(feasible(k, d, &BigRational::new((num - 1).into(), den.into()))); }
        } else {
            prop_assert!(!feasible(k, d + 1, &p));
            if k > 0 { prop_assert!(!feasible(k - 1, d, &p)); }
        }
    }

    #[test]
    fn pgm_is_complete_and_positive(seed in any::<u64>(), d in 2usize..=6, count in 1usize..=8) {
        let mut r = rng(seed);
        let states: Vec<CVector> = (0..count).map(|_| qql::linalg::random_state(&mut r, d)).collect();
        let pgm = pretty_good_measurement(&states).unwrap();
        prop_assert!(pgm.completeness_defect() < 1e-10);
        for j in 0..count {
            let eig = qql::linalg::HermitianEigen::new(&pgm.element(j));
            prop_assert!(eig.values.iter().all(|&l| l >= -1e-12));
        }
    }

    #[test]
    fn report_round_trips(seed in proptest::option::of(any::<u64>()), x in any::<f64>(), name in "[a-z-]{1,12}") {
        let x = if x.is_finite() { x } else { 0.5 };
        let r = RunReport::new(&name, json!({"N": 3, "p": "7/8"}), json!({"value": x, "m": "123456789012345678901234567890"}), x.abs(), seed);
        prop_assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn family_file_round_trips(seed in any::<u64>(), n in 1u32..=6, size in 1usize..=16) {
        let size = size.min(1 << n);
        let fam = random_family(&mut rng(seed), n, size).unwrap();
        prop_assert_eq!(FunctionFamily::from_json(&fam.to_json()).unwrap(), fam);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn analytic_gradient_matches_central_differences(seed in any::<u64>(), tau in 0.01f64..0.2) {
        let mut r = rng(seed);
        let (n, w, k, fam) = if r.random::<bool>() {
            (3, 1, 1, FunctionFamily::make(FamilyKind::Characters { n: 2 }).unwrap())
        } else {
            (2, 2, 2, FunctionFamily::make(FamilyKind::All { domain_size: 2 }).unwrap())
        };
        let p = ParamAlgorithm::random(&mut r, n, w, k, 1.0).unwrap();
        let g = evaluate(&p, &fam, tau, true).unwrap().gradient.unwrap();
        let h = 1e-6;
        let numeric: Vec<f64> = (0..g.len())
            .map(|i| {
                let (mut a, mut b) = (p.clone(), p.clone());
                a.theta_mut()[i] += h;
                b.theta_mut()[i] -= h;
                (objective(&a, &fam, tau).unwrap() - objective(&b, &fam, tau).unwrap()) / (2.0 * h)
            })
            .collect();
        let scale = numeric.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-8);
        for (a, b) in g.iter().zip(&numeric) {
            prop_assert!((a - b).abs() <= 1e-5 * scale, "analytic {} vs numeric {}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimizer_never_beats_the_ceiling(seed in any::<u64>(), n in 1u32..=3, k_frac in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let k = ((f64::from(n) * k_frac).ceil() as usize).clamp(1, n as usize);
        let size = r.random_range(2..=(1usize << n));
        let fam = random_family(&mut r, n, size).unwrap();
        let cfg = OptimizerConfig { restarts: 2, max_iterations: 300, seed, ..OptimizerConfig::default() };
        let res = optimize(&fam, k, &cfg).unwrap();
        let m: f64 = m_sum(u64::from(n), k as u64).unwrap().to_string().parse().unwrap();
        prop_assert!(res.best_worst_case * size as f64 <= m + 1e-6);
        prop_assert!(res.best_worst_case <= 1.0 + 1e-9);
    }
}

#[test]
fn seeded_optimizer_is_reproducible_on_one_worker() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let fam = FunctionFamily::make(FamilyKind::All { domain_size: 2 }).unwrap();
    let cfg = OptimizerConfig { restarts: 3, max_iterations: 200, seed: 11, ..OptimizerConfig::default() };
    let a = pool.install(|| optimize(&fam, 1, &cfg).unwrap());
    let b = pool.install(|| optimize(&fam, 1, &cfg).unwrap());
    let c = optimize(&fam, 1, &cfg).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.per_function, b.per_function);
    assert_eq!(a.restart_values, c.restart_values);
}

#[test]
fn bundles_saturate_the_counting_bound() {
    for n in 1..=4u32 {
        let b = build_character_distinguisher(n).unwrap();
        let domain = (1u64 << n) - 1;
        let lhs = BigRational::from_integer(b.family.len().into()) * &b.predicted_success;
        assert_eq!(lhs, BigRational::from_integer(m_sum(domain, 1).unwrap().into()));
    }
    for n in 1..=6u32 {
        for k in 1..=n {
            let b = build_uniform_subset_algorithm(n, k).unwrap();
            let lhs = BigRational::from_integer(b.family.len().into()) * &b.predicted_success;
            assert_eq!(lhs, BigRational::from_integer(m_sum(u64::from(n), u64::from(k)).unwrap().into()));
        }
    }
}

#[test]
fn bundles_have_degree_certificates() {
    for n in 1..=3 {
        let b = build_character_distinguisher(n).unwrap();
        let ex = extract_polynomials(&b.algorithm, &b.measurement).unwrap();
        assert!(ex.degree_certified());
        assert_eq!(ex.k, 1);
    }
    for n in 1..=4u32 {
        for k in 1..=n {
            let b = build_uniform_subset_algorithm(n, k).unwrap();
            let ex = extract_polynomials(&b.algorithm, &b.measurement).unwrap();
            assert!(ex.degree_certified(), "N = {n}, k = {k}: {}", ex.max_excess_coefficient);
        }
    }
}

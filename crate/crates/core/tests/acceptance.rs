//! Acceptance gate. Every criterion prints one PASS/FAIL line and asserts at
//! its stated tolerance and runtime budget.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qql::bounds::{m_sum, sorting_lower_bound};
use qql::linalg::C64;
use qql::optimizer::{max_ceiling_excess, optimize, search_seven_function_sets, OptimizerConfig};
use qql::oracle::{BooleanFunction, FamilyKind, FunctionFamily};
use qql::poly::{extract_polynomials, lemma_floor, minimizer};
use qql::random::{random_algorithm, random_family, random_function, random_measurement, random_normalized_polynomial};
use qql::reference::{build_character_distinguisher, build_uniform_subset_algorithm};
use qql::report::rational_to_f64;
use qql::simulator::{run_and_measure, success_matrix, Picture, Space};

fn verdict(criterion: &str, pass: bool, detail: String) {
    println!("{} criterion {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

/// `C(n, i)` for `i = 0..=n` by Pascal's rule, independent of the library.
fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![BigUint::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row
}

#[test]
fn criterion_1_character_distinguisher_exact() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut saturates = true;
    for n in 1..=6u32 {
        let b = build_character_distinguisher(n).unwrap();
        let sm = b.success_matrix().unwrap();
        let d = sm.size();
        for l in 0..d {
            for j in 0..d {
                let expected = if l == j { 1.0 } else { 0.0 };
                worst = worst.max((sm.matrix[(l, j)] - expected).abs());
            }
        }
        let domain = (1u64 << n) - 1;
        saturates &= BigUint::from(d) == m_sum(domain, 1).unwrap() && d as u64 == domain + 1;
    }
    let elapsed = start.elapsed();
    verdict(
        "1",
        worst <= 1e-12 && saturates && within(elapsed, 1),
        format!("max deviation from identity {worst:.2e}, D = N + 1 = M(N,1): {saturates}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_uniform_subset_equality() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=8u32 {
        let row = binomial_row(u64::from(n));
        for k in 1..=n {
            let m: BigUint = row[..=k as usize].iter().sum();
            let expected = m.to_f64().unwrap() / f64::from(1u32 << n);
            let b = build_uniform_subset_algorithm(n, k).unwrap();
            for p in b.success_matrix().unwrap().diagonal() {
                worst = worst.max((p - expected).abs());
            }
        }
    }
    let b = build_uniform_subset_algorithm(3, 2).unwrap();
    let seven_eighths = b.predicted_success == BigRational::new(7.into(), 8.into())
        && b.success_matrix().unwrap().diagonal().iter().all(|p| (p - 0.875).abs() <= 1e-12);
    let elapsed = start.elapsed();
    verdict(
        "2",
        worst <= 1e-12 && seven_eighths && within(elapsed, 30),
        format!("max |p_F - M(N,k)/2^N| = {worst:.2e} over N <= 8, (3,2) -> 7/8: {seven_eighths}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_3_lemma_floor() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut min_slack = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(1..=10u32);
        let k = rng.random_range(0..=n);
        let f0 = random_function(&mut rng, n).unwrap();
        let q = random_normalized_polynomial(&mut rng, n, k, &f0).unwrap();
        let floor = rational_to_f64(&lemma_floor(n, k).unwrap());
        min_slack = min_slack.min(q.exhaustive_norm_sqr().unwrap() - floor);
    }
    let mut worst_equality = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=10u32);
        let k = rng.random_range(0..=n);
        let f0 = random_function(&mut rng, n).unwrap();
        let q = minimizer(n, k, &f0).unwrap();
        let floor = rational_to_f64(&lemma_floor(n, k).unwrap());
        assert!((q.evaluate(&f0).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
        worst_equality = worst_equality.max((q.exhaustive_norm_sqr().unwrap() - floor).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        "3",
        min_slack >= -1e-12 && worst_equality <= 1e-12 && within(elapsed, 20),
        format!(
            "min slack over 1000 polynomials {min_slack:.3e}, minimizer equality error {worst_equality:.2e}, {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_4_degree_certificate() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let k = 1 + i % 3;
        let w = 1usize << rng.random_range(0..=2u32);
        let picture = if rng.random::<bool>() { Picture::Phase } else { Picture::BitFlip };
        let space = Space::new(picture, 4, w).unwrap();
        let alg = random_algorithm(&mut rng, space, k).unwrap();
        let outcomes = rng.random_range(1..=space.dim().min(8));
        let m = random_measurement(&mut rng, space.dim(), outcomes).unwrap();
        let ex = extract_polynomials(&alg, &m).unwrap();
        worst = worst.max(ex.max_excess_coefficient);
    }
    let elapsed = start.elapsed();
    verdict(
        "4",
        worst <= 1e-10 && within(elapsed, 60),
        format!("largest coefficient with |S| > k over 100 algorithms {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_5_global_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_direct = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(1..=8u32);
        let w = rng.random_range(1..=2usize);
        let k = rng.random_range(1..=3usize);
        let picture = if rng.random::<bool>() { Picture::Phase } else { Picture::BitFlip };
        let space = Space::new(picture, n, w).unwrap();
        let alg = random_algorithm(&mut rng, space, k).unwrap();
        let outcomes = rng.random_range(1..=space.dim());
        let m = random_measurement(&mut rng, space.dim(), outcomes).unwrap();
        let total_functions = f64::from(1u32 << n);
        let direct: f64 = BooleanFunction::all(n)
            .unwrap()
            .map(|f| run_and_measure(&alg, &m, &f).unwrap().iter().sum::<f64>())
            .sum();
        worst_direct = worst_direct.max((direct - total_functions).abs() / total_functions);
        let ex = extract_polynomials(&alg, &m).unwrap();
        let via_parseval = ex.total_parseval() * total_functions;
        worst_parseval = worst_parseval.max((via_parseval - total_functions).abs() / total_functions);
    }
    verdict(
        "5",
        worst_direct <= 1e-12 && worst_parseval <= 1e-12,
        format!(
            "relative error of sum_j sum_F ||P_j psi_F||^2 vs 2^N: direct {worst_direct:.2e}, via Parseval {worst_parseval:.2e}"
        ),
    );
}

#[test]
fn criterion_6_counting() {
    let start = Instant::now();
    let mut ok = m_sum(3, 2).unwrap() == BigUint::from(7u32);
    for n in 0..=64u64 {
        ok &= m_sum(n, n).unwrap() == BigUint::one() << n as usize;
        let row = binomial_row(n);
        let mut partial = BigUint::zero();
        for k in 0..=n {
            partial += &row[k as usize];
            ok &= m_sum(n, k).unwrap() == partial;
            if n >= 1 && k >= 1 && k < n {
                ok &= m_sum(n, k).unwrap() == m_sum(n - 1, k).unwrap() + m_sum(n - 1, k - 1).unwrap();
            }
        }
    }
    let s2 = sorting_lower_bound(2).unwrap().k_min;
    let s3 = sorting_lower_bound(3).unwrap().k_min;
    let elapsed = start.elapsed();
    verdict(
        "6 (counting)",
        ok && s2 == 1 && s3 == 2 && within(elapsed, 10),
        format!("M(3,2) = 7, M(N,N) = 2^N and Pascal for N <= 64: {ok}; k_min(2) = {s2}, k_min(3) = {s3}; {elapsed:.2?}"),
    );
}

/// `k_min(n)` for `lo <= n <= hi` from one Pascal sweep over rows
/// `0..=C(hi, 2)`, truncated to the first `width` entries.
fn k_min_oracle(lo: u64, hi: u64, width: usize) -> Vec<(u64, u64)> {
    let mut row = vec![BigUint::zero(); width];
    row[0] = BigUint::one();
    let mut out = Vec::new();
    let mut n = lo;
    let mut orderings: BigUint = (1..=lo).map(BigUint::from).product();
    for m in 0..=hi * (hi - 1) / 2 {
        if m > 0 {
            for i in (1..width).rev() {
                let prev = row[i - 1].clone();
                row[i] += prev;
            }
        }
        while n <= hi && m == n * (n - 1) / 2 {
            let mut total = BigUint::zero();
            let k = row
                .iter()
                .position(|c| {
                    total += c;
                    total >= orderings
                })
                .expect("truncation width covers k_min");
            out.push((n, k as u64));
            n += 1;
            orderings *= BigUint::from(n);
        }
    }
    out
}

#[test]
fn criterion_6_sorting_ratio_monotone() {
    let start = Instant::now();
    let mut agree = true;
    let mut values = Vec::new();
    for (n, k) in k_min_oracle(10, 200, 200) {
        agree &= sorting_lower_bound(n).unwrap().k_min == k;
        values.push((n, k));
    }
    let drops: Vec<String> = values
        .windows(2)
        .filter(|w| (w[1].1 as f64) / (w[1].0 as f64) < (w[0].1 as f64) / (w[0].0 as f64))
        .map(|w| format!("{}/{} -> {}/{}", w[0].1, w[0].0, w[1].1, w[1].0))
        .collect();
    let elapsed = start.elapsed();
    verdict(
        "6 (k_min(n)/n non-decreasing, 10 <= n <= 200)",
        agree && drops.is_empty() && within(elapsed, 10),
        format!(
            "library agrees with the Pascal oracle: {agree}; {} decreases, first {:?}; {elapsed:.2?}",
            drops.len(),
            drops.iter().take(3).collect::<Vec<_>>()
        ),
    );
}

fn tight_config(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts: 200,
        max_iterations: 2000,
        seed,
        ..OptimizerConfig::default()
    }
}

#[test]
fn criterion_7_optimizer_tight_cases() {
    let start = Instant::now();
    let chars = FunctionFamily::make(FamilyKind::Characters { n: 2 }).unwrap();
    let a = optimize(&chars, 1, &tight_config(7)).unwrap();
    let all3 = FunctionFamily::make(FamilyKind::All { domain_size: 3 }).unwrap();
    let b = optimize(&all3, 2, &tight_config(7)).unwrap();
    let elapsed = start.elapsed();
    let ok_a = a.best_worst_case >= 1.0 - 1e-6;
    let ok_b = b.best_worst_case >= 0.875 - 0.01 && b.best_worst_case <= 0.875 + 1e-9;
    verdict(
        "7",
        ok_a && ok_b && within(elapsed, 600),
        format!(
            "characters(2), k=1: {:.10} ({} restarts); all(3), k=2: {:.10} ({} restarts); {elapsed:.2?}",
            a.best_worst_case, a.restarts_run, b.best_worst_case, b.restarts_run
        ),
    );
}

#[test]
fn criterion_8_optimizer_ceiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let quick = OptimizerConfig {
        restarts: 8,
        max_iterations: 600,
        ..OptimizerConfig::default()
    };
    let mut local_excess = f64::NEG_INFINITY;
    for i in 0..10u64 {
        let n = rng.random_range(1..=3u32);
        let size = rng.random_range(2..=(1usize << n));
        let k = rng.random_range(1..=n as usize);
        let fam = random_family(&mut rng, n, size).unwrap();
        let res = optimize(&fam, k, &OptimizerConfig { seed: i, ..quick.clone() }).unwrap();
        let m = m_sum(u64::from(n), k as u64).unwrap().to_f64().unwrap();
        local_excess = local_excess.max(res.best_worst_case * size as f64 - m);
    }
    let search = search_seven_function_sets(&OptimizerConfig {
        restarts: 16,
        seed: 8,
        ..OptimizerConfig::default()
    })
    .unwrap();
    let excess = max_ceiling_excess().max(local_excess);
    let rows: Vec<String> = search
        .rows
        .iter()
        .map(|r| format!("{}:{:.6}", r.omitted, r.best_worst_case))
        .collect();
    verdict(
        "8",
        excess <= 1e-6 && search.rows.len() == 8 && search.all_below_one,
        format!(
            "max p*D - M(N,k) over all runs {excess:.3e}; best found for the 8 seven-function sets (omitted:value) {}; global max {:.6}",
            rows.join(" "),
            search.global_max
        ),
    );
}

#[test]
fn criterion_9_picture_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=4u32);
        let w = rng.random_range(1..=2usize);
        let k = rng.random_range(1..=3usize);
        let space = Space::new(Picture::BitFlip, n, w).unwrap();
        let alg = random_algorithm(&mut rng, space, k).unwrap();
        let size = rng.random_range(1..=(1usize << n).min(space.dim()));
        let fam = random_family(&mut rng, n, size).unwrap();
        let m = random_measurement(&mut rng, space.dim(), size).unwrap();
        let c = space.conversion_matrix(Picture::Phase).unwrap();
        let phase_alg = alg.convert_picture(Picture::Phase).unwrap();
        let phase_m = m.transformed(&c).unwrap();
        let a = success_matrix(&alg, &m, &fam).unwrap();
        let b = success_matrix(&phase_alg, &phase_m, &fam).unwrap();
        worst = worst.max(a.max_deviation(&b));
    }
    verdict(
        "9",
        worst <= 1e-12,
        format!("max success-matrix deviation between pictures over 50 algorithms {worst:.2e}"),
    );
}

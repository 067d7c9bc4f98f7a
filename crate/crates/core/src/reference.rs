//! Algorithms that meet the counting bound with equality.
//!
//! - [`build_character_distinguisher`]: one query separates the `N + 1`
//!   character functions `f_a(x) = (-1)^{a.x}` on `N = 2^n - 1` exactly.
//! - [`build_uniform_subset_algorithm`]: `k` queries identify any of the
//!   `2^N` functions with probability `M(N, k) / 2^N`.
//!
//! Both live in the phase picture. The second one keeps a subset register
//! `S` in the workspace (`W = 2^N`, `w = mask of S`) and feeds the elements
//! of `S` to the oracle one per round, so the phases multiply to
//! `chi_S(F)`. A Walsh–Hadamard transform of the subset register then
//! points at the guess `G` with amplitude `sum_S chi_S(F) chi_S(G)`.

use num_rational::BigRational;

use crate::bounds::{m_sum, pow2, ratio};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ZERO};
use crate::oracle::{chi_bits, FamilyKind, FunctionFamily, SubsetMask};
use crate::simulator::{success_matrix, Algorithm, Measurement, Operator, Picture, Space, SuccessMatrix};

/// Largest `N` for the uniform-subset construction (state dimension `2 N 2^N`).
pub const MAX_UNIFORM_SUBSET_DOMAIN: u32 = 12;

/// Algorithm, measurement and family together with the success probability
/// the construction guarantees for every member.
#[derive(Clone, Debug)]
pub struct AlgorithmBundle {
    pub algorithm: Algorithm,
    pub measurement: Measurement,
    pub family: FunctionFamily,
    pub predicted_success: BigRational,
}

impl AlgorithmBundle {
    pub fn success_matrix(&self) -> Result<SuccessMatrix> {
        success_matrix(&self.algorithm, &self.measurement, &self.family)
    }

    /// Largest `|P(success | F_j) - predicted|` over the family.
    pub fn max_prediction_error(&self) -> Result<f64> {
        let predicted = crate::report::rational_to_f64(&self.predicted_success);
        Ok(self
            .success_matrix()?
            .diagonal()
            .into_iter()
            .map(|p| (p - predicted).abs())
            .fold(0.0, f64::max))
    }
}

/// `M(N, k) / 2^N`.
pub fn predicted_success(domain_size: u32, k: u32) -> Result<BigRational> {
    let n = u64::from(domain_size);
    Ok(ratio(&m_sum(n, u64::from(k))?, &pow2(n)))
}

/// Exact single-query distinguisher for the characters on `N = 2^n - 1`.
///
/// `|s> = (N+1)^{-1/2} sum_{x=0..N} |x>` and `V_1` is the `(N+1)`-point
/// character transform `<a|V_1|x> = (-1)^{a.x} / sqrt(N+1)`, so the final
/// state for `f_a` is `|a>`. The auxiliary labels are left alone and
/// folded into outcome 0.
pub fn build_character_distinguisher(n: u32) -> Result<AlgorithmBundle> {
    if !(1..=6).contains(&n) {
        return Err(Error::parameter(format!(
            "character distinguisher needs 1 <= n <= 6, got {n}"
        )));
    }
    let domain_size = (1u32 << n) - 1;
    let labels = domain_size as usize + 1;
    let space = Space::new(Picture::Phase, domain_size, 1)?;
    let dim = space.dim();

    let amp = C64::new(1.0 / (labels as f64).sqrt(), 0.0);
    let mut initial = CVector::from_element(dim, ZERO);
    for x in 0..labels {
        initial[x] = amp;
    }

    let mut v1 = CMatrix::identity(dim, dim);
    for a in 0..labels {
        for x in 0..labels {
            v1[(a, x)] = amp * f64::from(chi_bits(a as u64, x as u64));
        }
    }

    let mut outcomes: Vec<Vec<usize>> = (0..labels).map(|a| vec![a]).collect();
    outcomes[0].extend(labels..dim);
    let measurement = Measurement::from_standard_basis(dim, outcomes)?;
    let algorithm = Algorithm::new(space, initial, vec![Operator::Dense(v1)])?;
    Ok(AlgorithmBundle {
        algorithm,
        measurement,
        family: FunctionFamily::make(FamilyKind::Characters { n })?,
        predicted_success: BigRational::from_integer(1.into()),
    })
}

/// `k`-query algorithm identifying each of the `2^N` functions with
/// probability `M(N, k) / 2^N`.
pub fn build_uniform_subset_algorithm(domain_size: u32, k: u32) -> Result<AlgorithmBundle> {
    if domain_size > MAX_UNIFORM_SUBSET_DOMAIN {
        return Err(Error::capacity(format!(
            "uniform-subset construction limited to N <= {MAX_UNIFORM_SUBSET_DOMAIN}, got {domain_size}"
        )));
    }
    if domain_size == 0 || k == 0 || k > domain_size {
        return Err(Error::parameter(format!(
            "need 1 <= k <= N, got N = {domain_size}, k = {k}"
        )));
    }
    let workspace = 1usize << domain_size;
    let space = Space::new(Picture::Phase, domain_size, workspace)?;
    let dim = space.dim();
    let index = |x: u32, s: usize| x as usize * workspace + s;

    // subsets with |S| <= k, ordered by (size, value)
    let mut subsets: Vec<usize> = (0..workspace)
        .filter(|&s| s.count_ones() <= k)
        .collect();
    subsets.sort_by_key(|&s| (s.count_ones(), s));
    let weight = subsets.len();
    debug_assert_eq!(Some(weight as u64), m_sum(u64::from(domain_size), u64::from(k))?.try_into().ok());

    let nth = |s: usize, i: u32| SubsetMask(s as u64).nth_element(i);

    let amp = C64::new(1.0 / (weight as f64).sqrt(), 0.0);
    let mut initial = CVector::from_element(dim, ZERO);
    for &s in &subsets {
        initial[index(nth(s, 1), s)] = amp;
    }

    // Swap the x-values a and b inside the block of subset s.
    let transposition = |pairs: &dyn Fn(usize) -> (u32, u32)| -> Vec<usize> {
        let mut target: Vec<usize> = (0..dim).collect();
        for s in 0..workspace {
            let (a, b) = pairs(s);
            if a != b {
                target[index(a, s)] = index(b, s);
                target[index(b, s)] = index(a, s);
            }
        }
        target
    };

    let mut unitaries = Vec::with_capacity(k as usize);
    for round in 1..k {
        unitaries.push(Operator::Permutation(transposition(&|s| {
            (nth(s, round), nth(s, round + 1))
        })));
    }
    unitaries.push(Operator::Sequence(vec![
        Operator::Permutation(transposition(&|s| (nth(s, k), 0))),
        Operator::BlockWalshHadamard { block: workspace },
    ]));

    // Outcome G: every label paired with subset register G.
    let labels = 2 * domain_size as usize;
    let outcomes: Vec<Vec<usize>> = (0..workspace)
        .map(|g| (0..labels).map(|slot| slot * workspace + g).collect())
        .collect();
    let measurement = Measurement::from_standard_basis(dim, outcomes)?;
    let algorithm = Algorithm::new(space, initial, unitaries)?;
    Ok(AlgorithmBundle {
        algorithm,
        measurement,
        family: FunctionFamily::make(FamilyKind::All { domain_size })?,
        predicted_success: predicted_success(domain_size, k)?,
    })
}

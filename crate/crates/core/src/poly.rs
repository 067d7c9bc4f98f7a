//! Amplitudes of `k`-query algorithms as multilinear polynomials in the
//! oracle values.
//!
//! Every amplitude `<r|psi_F>` is `sum_{|S|<=k} a_S chi_S(F)`. The
//! coefficients are recovered exactly from the `2^N` amplitude values by the
//! character transform `a_S = 2^-N sum_F chi_S(F) <r|psi_F>`, and
//! orthogonality of characters gives `sum_F |Q(F)|^2 = 2^N sum_S |a_S|^2`.
//! Among polynomials of degree `<= k` with `|Q(F0)| = 1` that sum is
//! minimized by taking every `|a_S|` equal to `1/M(N,k)`.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{m_sum, pow2, ratio};
use crate::error::{Error, Result};
use crate::linalg::{fwht, CVector, C64, ZERO};
use crate::oracle::{chi_bits, BooleanFunction, SubsetMask, MAX_DOMAIN};
use crate::simulator::{Algorithm, Measurement};

/// Largest coefficient vector we are willing to allocate.
const MAX_COEFFICIENTS: usize = 1 << 24;

/// Largest domain for the exhaustive `2^N` sweep in [`extract_polynomials`].
pub const MAX_EXTRACT_DOMAIN: u32 = 16;

/// Largest domain for exhaustive sums over all functions.
pub const MAX_EXHAUSTIVE_DOMAIN: u32 = 20;

/// Coefficients whose subsets exceed the degree bound must stay below this.
pub const DEGREE_CERTIFICATE_TOL: f64 = 1e-10;

fn binomial_table(n: u32) -> Vec<Vec<u64>> {
    let n = n as usize;
    let mut t = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1].saturating_add(if j < i { t[i - 1][j] } else { 0 });
        }
    }
    t
}

/// Dense ranking of the subsets `S ⊆ {1..N}` with `|S| <= k`, ordered by
/// size and then numerically (colex within each size).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetIndex {
    domain_size: u32,
    degree_cap: u32,
    binom: Vec<Vec<u64>>,
    offsets: Vec<usize>,
}

impl SubsetIndex {
    pub fn new(domain_size: u32, degree_cap: u32) -> Result<Self> {
        if domain_size == 0 || domain_size > MAX_DOMAIN {
            return Err(Error::domain(format!("domain size {domain_size} outside 1..=64")));
        }
        if degree_cap > domain_size {
            return Err(Error::parameter(format!(
                "degree cap {degree_cap} exceeds N = {domain_size}"
            )));
        }
        let binom = binomial_table(domain_size);
        let mut offsets = Vec::with_capacity(degree_cap as usize + 2);
        let mut acc = 0usize;
        offsets.push(0);
        for &c in binom[domain_size as usize].iter().take(degree_cap as usize + 1) {
            let c = c as usize;
            acc = acc
                .checked_add(c)
                .filter(|&a| a <= MAX_COEFFICIENTS)
                .ok_or_else(|| {
                    Error::capacity(format!(
                        "more than {MAX_COEFFICIENTS} coefficients for N = {domain_size}, k = {degree_cap}"
                    ))
                })?;
            offsets.push(acc);
        }
        Ok(Self {
            domain_size,
            degree_cap,
            binom,
            offsets,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank(&self, s: SubsetMask) -> Option<usize> {
        if !s.fits(self.domain_size) || s.len() > self.degree_cap {
            return None;
        }
        let mut bits = s.0;
        let mut r = self.offsets[s.len() as usize];
        let mut i = 1usize;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            r += self.binom[c][i] as usize;
            bits &= bits - 1;
            i += 1;
        }
        Some(r)
    }

    pub fn unrank(&self, rank: usize) -> SubsetMask {
        assert!(rank < self.len(), "rank out of range");
        let size = self.offsets.partition_point(|&o| o <= rank) - 1;
        let mut rem = (rank - self.offsets[size]) as u64;
        let mut bits = 0u64;
        for i in (1..=size).rev() {
            // largest c with C(c, i) <= rem
            let mut c = i - 1;
            while c + 1 < self.domain_size as usize && self.binom[c + 1][i] <= rem {
                c += 1;
            }
            rem -= self.binom[c][i];
            bits |= 1 << c;
        }
        SubsetMask(bits)
    }
}

/// `Q(F) = sum_{|S| <= k} a_S chi_S(F)` with coefficients stored densely in
/// [`SubsetIndex`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearPolynomial {
    index: SubsetIndex,
    coefficients: Vec<C64>,
}

impl MultilinearPolynomial {
    pub fn zero(domain_size: u32, degree_cap: u32) -> Result<Self> {
        let index = SubsetIndex::new(domain_size, degree_cap)?;
        let coefficients = vec![ZERO; index.len()];
        Ok(Self {
            index,
            coefficients,
        })
    }

    pub fn from_terms(
        domain_size: u32,
        degree_cap: u32,
        terms: impl IntoIterator<Item = (SubsetMask, C64)>,
    ) -> Result<Self> {
        let mut q = Self::zero(domain_size, degree_cap)?;
        for (s, a) in terms {
            q.set(s, a)?;
        }
        Ok(q)
    }

    #[inline]
    pub fn domain_size(&self) -> u32 {
        self.index.domain_size
    }
    #[inline]
    pub fn degree_cap(&self) -> u32 {
        self.index.degree_cap
    }
    #[inline]
    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }
    #[inline]
    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }
    #[inline]
    pub fn coefficients_mut(&mut self) -> &mut [C64] {
        &mut self.coefficients
    }

    pub fn coefficient(&self, s: SubsetMask) -> C64 {
        self.index.rank(s).map_or(ZERO, |r| self.coefficients[r])
    }

    pub fn set(&mut self, s: SubsetMask, a: C64) -> Result<()> {
        let r = self.index.rank(s).ok_or_else(|| {
            Error::domain(format!(
                "subset {:?} not allowed with N = {}, degree cap {}",
                s.elements(),
                self.domain_size(),
                self.degree_cap()
            ))
        })?;
        self.coefficients[r] = a;
        Ok(())
    }

    /// Nonzero `(S, a_S)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (SubsetMask, C64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(|(r, a)| (self.index.unrank(r), *a))
    }

    /// Largest `|S|` carrying a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        (0..=self.degree_cap())
            .rev()
            .find(|&size| {
                let (lo, hi) = (self.index.offsets[size as usize], self.index.offsets[size as usize + 1]);
                self.coefficients[lo..hi].iter().any(|a| *a != ZERO)
            })
            .unwrap_or(0)
    }

    /// `Q(F(1), .., F(N))`.
    pub fn evaluate(&self, f: &BooleanFunction) -> Result<C64> {
        if f.domain_size() != self.domain_size() {
            return Err(Error::domain(format!(
                "polynomial on N = {} evaluated at a function on N = {}",
                self.domain_size(),
                f.domain_size()
            )));
        }
        Ok(self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(|(r, a)| *a * f64::from(chi_bits(self.index.unrank(r).0, f.mask())))
            .sum())
    }

    /// `Q(F)` for every `F`, indexed by mask, via one Walsh–Hadamard pass.
    pub fn values_on_all(&self) -> Result<Vec<C64>> {
        let n = self.domain_size();
        if n > MAX_EXHAUSTIVE_DOMAIN {
            return Err(Error::capacity(format!(
                "exhaustive evaluation limited to N <= {MAX_EXHAUSTIVE_DOMAIN}"
            )));
        }
        let mut table = vec![ZERO; 1usize << n];
        for (r, a) in self.coefficients.iter().enumerate() {
            table[self.index.unrank(r).0 as usize] = *a;
        }
        fwht(&mut table);
        Ok(table)
    }

    /// `sum_F |Q(F)|^2` over all `2^N` functions.
    pub fn exhaustive_norm_sqr(&self) -> Result<f64> {
        Ok(self.values_on_all()?.iter().map(|z| z.norm_sqr()).sum())
    }

    /// `sum_S |a_S|^2`, which equals `2^-N sum_F |Q(F)|^2`.
    pub fn parseval(&self) -> f64 {
        parseval(self)
    }

    pub fn scale(&mut self, factor: C64) {
        for a in &mut self.coefficients {
            *a *= factor;
        }
    }

    pub fn to_report(&self) -> PolynomialReport {
        PolynomialReport {
            domain_size: self.domain_size(),
            coefficients: self
                .terms()
                .map(|(s, a)| CoefficientEntry {
                    subset: s.elements(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }

    /// Rebuilds a polynomial from its report; the degree cap is the largest
    /// listed subset unless `degree_cap` is given.
    pub fn from_report(report: &PolynomialReport, degree_cap: Option<u32>) -> Result<Self> {
        let mut terms = Vec::with_capacity(report.coefficients.len());
        for c in &report.coefficients {
            terms.push((SubsetMask::from_elements(&c.subset)?, C64::new(c.re, c.im)));
        }
        let cap = degree_cap.unwrap_or_else(|| terms.iter().map(|(s, _)| s.len()).max().unwrap_or(0));
        Self::from_terms(report.domain_size, cap, terms)
    }
}

/// `sum_S |a_S|^2`.
pub fn parseval(q: &MultilinearPolynomial) -> f64 {
    q.coefficients.iter().map(|a| a.norm_sqr()).sum()
}

/// JSON form: `{"domain_size": N, "coefficients": [{"subset": [..], "re":, "im":}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialReport {
    pub domain_size: u32,
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub subset: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// Polynomials `Q_{l r}` for every outcome `l` and basis vector `r`.
#[derive(Clone, Debug)]
pub struct PolynomialExtraction {
    pub k: u32,
    pub outcomes: Vec<Vec<MultilinearPolynomial>>,
    /// Largest `|a_S|` with `|S| > k`; at most [`DEGREE_CERTIFICATE_TOL`]
    /// for any genuine `k`-query algorithm.
    pub max_excess_coefficient: f64,
}

impl PolynomialExtraction {
    pub fn degree_certified(&self) -> bool {
        self.max_excess_coefficient <= DEGREE_CERTIFICATE_TOL
    }

    /// `sum_r |Q_{l r}(F)|^2`, the polynomial form of `||P_l psi_F||^2`.
    pub fn outcome_probability(&self, l: usize, f: &BooleanFunction) -> Result<f64> {
        self.outcomes[l]
            .iter()
            .map(|q| q.evaluate(f).map(|z| z.norm_sqr()))
            .sum()
    }

    /// `sum_l sum_r parseval(Q_{l r})`; equals 1 for a complete measurement.
    pub fn total_parseval(&self) -> f64 {
        self.outcomes.iter().flatten().map(parseval).sum()
    }
}

/// Runs `alg` on all `2^N` functions and transforms every measured
/// amplitude into character coefficients.
pub fn extract_polynomials(alg: &Algorithm, m: &Measurement) -> Result<PolynomialExtraction> {
    let n = alg.space().domain_size();
    if n > MAX_EXTRACT_DOMAIN {
        return Err(Error::capacity(format!(
            "polynomial extraction sweeps 2^N functions; N = {n} exceeds {MAX_EXTRACT_DOMAIN}"
        )));
    }
    if m.dim() != alg.space().dim() {
        return Err(Error::model("measurement and algorithm dimensions differ"));
    }
    let k = u32::try_from(alg.k()).unwrap_or(u32::MAX).min(n);
    let functions: Vec<BooleanFunction> = BooleanFunction::all(n)?.collect();
    let rows: Vec<&crate::simulator::SparseVector> = (0..m.outcome_count())
        .flat_map(|l| m.outcome(l).iter())
        .collect();
    if rows.len().saturating_mul(functions.len()) > 1 << 28 {
        return Err(Error::capacity("amplitude table too large"));
    }

    // amplitudes[F][r]
    let amplitudes: Vec<Vec<C64>> = functions
        .par_iter()
        .map(|f| {
            let psi: CVector = alg.run(f)?.amplitudes;
            Ok(rows.iter().map(|r| Measurement::overlap(r, &psi)).collect())
        })
        .collect::<Result<_>>()?;

    let size = functions.len();
    let scale = 1.0 / size as f64;
    let index = SubsetIndex::new(n, k)?;
    let per_row: Vec<(MultilinearPolynomial, f64)> = (0..rows.len())
        .into_par_iter()
        .map(|r| {
            let mut table: Vec<C64> = amplitudes.iter().map(|row| row[r]).collect();
            fwht(&mut table);
            let mut q = MultilinearPolynomial {
                index: index.clone(),
                coefficients: vec![ZERO; index.len()],
            };
            let mut excess = 0.0f64;
            for (s, a) in table.iter().enumerate() {
                let a = *a * scale;
                match index.rank(SubsetMask(s as u64)) {
                    Some(rank) => q.coefficients[rank] = a,
                    None => excess = excess.max(a.norm()),
                }
            }
            (q, excess)
        })
        .collect();

    let mut max_excess = 0.0f64;
    let mut iter = per_row.into_iter();
    let mut outcomes = Vec::with_capacity(m.outcome_count());
    for l in 0..m.outcome_count() {
        let mut polys = Vec::with_capacity(m.outcome(l).len());
        for _ in 0..m.outcome(l).len() {
            let (q, e) = iter.next().expect("one polynomial per basis vector");
            max_excess = max_excess.max(e);
            polys.push(q);
        }
        outcomes.push(polys);
    }
    Ok(PolynomialExtraction {
        k,
        outcomes,
        max_excess_coefficient: max_excess,
    })
}

/// `2^N / M(N, k)` exactly.
pub fn lemma_floor(domain_size: u32, k: u32) -> Result<BigRational> {
    let m = m_sum(u64::from(domain_size), u64::from(k))?;
    Ok(ratio(&pow2(u64::from(domain_size)), &m))
}

/// The equal-coefficient polynomial `a_S = chi_S(F0) / M(N, k)`, `|S| <= k`.
/// It takes the value 1 at `F0` and attains the lemma floor.
pub fn minimizer(domain_size: u32, k: u32, f0: &BooleanFunction) -> Result<MultilinearPolynomial> {
    if f0.domain_size() != domain_size {
        return Err(Error::domain("F0 lives on a different domain"));
    }
    let mut q = MultilinearPolynomial::zero(domain_size, k)?;
    let m = q.coefficients.len() as f64;
    for r in 0..q.coefficients.len() {
        let s = q.index.unrank(r);
        q.coefficients[r] = C64::new(f64::from(chi_bits(s.0, f0.mask())) / m, 0.0);
    }
    Ok(q)
}

/// Outcome of checking `sum_F |Q(F)|^2 >= 2^N / M(N, deg Q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LemmaAudit {
    Applicable {
        degree: u32,
        /// `sum_F |Q(F)|^2`, by exhaustive evaluation.
        sum: f64,
        /// Exact floor as `"num/den"`.
        floor: String,
        floor_value: f64,
        passes: bool,
        /// `sum - floor`.
        slack: f64,
    },
    /// `|Q(F0)| != 1`.
    NotApplicable { value_modulus: f64 },
}

/// Lower-bound slack allowed by [`lemma_audit`].
pub const LEMMA_TOL: f64 = 1e-12;

/// Audits `Q` against the lemma at `F0`; requires `|Q(F0)| = 1` within 1e-9.
pub fn lemma_audit(q: &MultilinearPolynomial, f0: &BooleanFunction) -> Result<LemmaAudit> {
    let value = q.evaluate(f0)?.norm();
    if (value - 1.0).abs() > 1e-9 {
        return Ok(LemmaAudit::NotApplicable {
            value_modulus: value,
        });
    }
    let degree = q.degree();
    let floor = lemma_floor(q.domain_size(), degree)?;
    let floor_value = crate::report::rational_to_f64(&floor);
    let sum = q.exhaustive_norm_sqr()?;
    Ok(LemmaAudit::Applicable {
        degree,
        sum,
        floor: crate::bounds::format_rational(&floor),
        floor_value,
        passes: sum >= floor_value - LEMMA_TOL,
        slack: sum - floor_value,
    })
}

//! Exact counting bounds on how many functions `k` queries can tell apart.
//!
//! With `M(N, k) = sum_{i<=k} C(N, i)`, a `k`-query algorithm that identifies
//! each of `D` functions with probability at least `p` needs `D p <= M(N, k)`.
//! Classically the corresponding count is `2^k`, independent of `N`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `M(N, k) = 1 + C(N,1) + ... + C(N,k)` in arbitrary precision.
pub fn m_sum(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::parameter(format!("query budget k = {k} exceeds N = {n}")));
    }
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for i in 0..k {
        term = term * (n - i) / (i + 1);
        total += &term;
    }
    Ok(total)
}

/// `M(N, k)` as an `f64`, for numerical code that only needs the magnitude.
pub fn m_sum_f64(n: u64, k: u64) -> Result<f64> {
    Ok(m_sum(n, k)?.to_f64().unwrap_or(f64::INFINITY))
}

fn check_probability(p: &BigRational) -> Result<()> {
    if !p.is_positive() || *p > BigRational::one() {
        return Err(Error::parameter(format!("success probability {p} outside (0, 1]")));
    }
    Ok(())
}

/// Largest `D` allowed at success probability `p`: `floor(M(N, k) / p)`.
pub fn max_distinguishable(n: u64, k: u64, p: &BigRational) -> Result<BigUint> {
    check_probability(p)?;
    let bound = BigRational::from_integer(m_sum(n, k)?.into()) / p;
    bound
        .floor()
        .to_integer()
        .to_biguint()
        .ok_or_else(|| Error::parameter("negative bound"))
}

/// A candidate `(N, k, p, D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundQuery {
    pub domain_size: u64,
    pub k: u64,
    pub p: BigRational,
    pub family_size: BigUint,
}

impl BoundQuery {
    pub fn new(domain_size: u64, k: u64, p: BigRational, family_size: BigUint) -> Result<Self> {
        if k > domain_size {
            return Err(Error::parameter(format!("k = {k} exceeds N = {domain_size}")));
        }
        check_probability(&p)?;
        if family_size.is_zero() {
            return Err(Error::parameter("family size must be at least 1"));
        }
        Ok(Self {
            domain_size,
            k,
            p,
            family_size,
        })
    }
}

/// `D p <= M(N, k)` exactly. `false` rules out every algorithm.
pub fn is_feasible(q: &BoundQuery) -> Result<bool> {
    let lhs = BigRational::from_integer(q.family_size.clone().into()) * &q.p;
    let rhs = BigRational::from_integer(m_sum(q.domain_size, q.k)?.into());
    Ok(lhs <= rhs)
}

/// Certificate for the minimal query count that could sort `n` items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortingBound {
    pub n: u64,
    /// `C(n, 2)` comparison oracles.
    pub domain_size: u64,
    pub k_min: u64,
    /// `n!`, as a decimal string.
    pub orderings: String,
    /// `M(C(n,2), k_min)`.
    pub m_at_k_min: String,
    /// `M(C(n,2), k_min - 1)`, strictly below `n!`.
    pub m_below_k_min: String,
}

/// Smallest `k` with `n! <= M(C(n, 2), k)`.
pub fn sorting_lower_bound(n: u64) -> Result<SortingBound> {
    if n < 2 {
        return Err(Error::parameter(format!("sorting needs n >= 2 items, got {n}")));
    }
    let domain_size = n * (n - 1) / 2;
    let orderings: BigUint = (1..=n).map(BigUint::from).product();
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    let mut previous = BigUint::zero();
    let mut k = 0u64;
    while total < orderings {
        // C(N, k+1) = C(N, k) (N - k) / (k + 1)
        term = term * (domain_size - k) / (k + 1);
        previous = total.clone();
        total += &term;
        k += 1;
        debug_assert!(k <= domain_size, "M(N, N) = 2^N >= n! always");
    }
    Ok(SortingBound {
        n,
        domain_size,
        k_min: k,
        orderings: orderings.to_str_radix(10),
        m_at_k_min: total.to_str_radix(10),
        m_below_k_min: previous.to_str_radix(10),
    })
}

/// Parses `"a/b"`, an integer, or a finite decimal such as `"0.875"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parameter(format!("cannot parse {s:?} as a rational"));
    if let Some((a, b)) = s.split_once('/') {
        let a: num_bigint::BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: num_bigint::BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: num_bigint::BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(digits, scale));
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}

/// `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `2^n` exactly.
pub fn pow2(n: u64) -> BigUint {
    BigUint::one() << n as usize
}

/// `gcd`-reduced `a / b` with `a`, `b` unsigned.
pub fn ratio(a: &BigUint, b: &BigUint) -> BigRational {
    let g = a.gcd(b);
    BigRational::new((a / &g).into(), (b / &g).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn m_sum_examples() {
        assert_eq!(m_sum(3, 2).unwrap(), BigUint::from(7u32));
        for n in 0..=64 {
            assert_eq!(m_sum(n, n).unwrap(), pow2(n));
            assert_eq!(m_sum(n, 0).unwrap(), BigUint::one());
        }
        assert!(matches!(m_sum(3, 4), Err(Error::Parameter(_))));
    }

    #[test]
    fn m_sum_pascal() {
        for n in 2..=40u64 {
            for k in 1..n {
                assert_eq!(
                    m_sum(n, k).unwrap(),
                    m_sum(n - 1, k).unwrap() + m_sum(n - 1, k - 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn max_distinguishable_examples() {
        assert_eq!(max_distinguishable(5, 2, &r("1")).unwrap(), m_sum(5, 2).unwrap());
        assert_eq!(max_distinguishable(3, 2, &r("7/8")).unwrap(), BigUint::from(8u32));
        assert_eq!(max_distinguishable(3, 1, &r("1")).unwrap(), BigUint::from(4u32));
        assert!(max_distinguishable(3, 1, &r("0")).is_err());
        assert!(max_distinguishable(3, 1, &r("-1/2")).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let q = |d: u32, n, k, p: &str| {
            is_feasible(&BoundQuery::new(n, k, r(p), BigUint::from(d)).unwrap()).unwrap()
        };
        assert!(q(7, 3, 2, "1"));
        assert!(!q(8, 3, 2, "1"));
        assert!(q(8, 3, 2, "7/8"));
        assert!(q(1, 10, 0, "1/1000"));
        assert!(BoundQuery::new(3, 4, r("1"), BigUint::from(1u32)).is_err());
    }

    #[test]
    fn sorting_small_cases() {
        assert_eq!(sorting_lower_bound(2).unwrap().k_min, 1);
        assert_eq!(sorting_lower_bound(3).unwrap().k_min, 2);
        assert!(sorting_lower_bound(1).is_err());
        let cert = sorting_lower_bound(3).unwrap();
        assert_eq!(cert.orderings, "6");
        assert_eq!(cert.m_at_k_min, "7");
        assert_eq!(cert.m_below_k_min, "4");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(r("7/8"), BigRational::new(7.into(), 8.into()));
        assert_eq!(r("0.875"), r("7/8"));
        assert_eq!(r("1"), BigRational::one());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&r("14/16")), "7/8");
        assert_eq!(format_rational(&r("1")), "1/1");
    }
}

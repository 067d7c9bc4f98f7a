//! Two-valued oracle functions, families of candidate functions, and
//! character (monomial) evaluation.
//!
//! A function `F: {1..N} -> {-1,+1}` is stored as an `N`-bit mask where bit
//! `x-1` is set exactly when `F(x) = -1`. The same encoding is used for
//! subsets `S ⊆ {1..N}`, so the character `chi_S(F) = prod_{x in S} F(x)`
//! reduces to the parity of `popcount(S & F)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest domain that fits the mask representation.
pub const MAX_DOMAIN: u32 = 64;

/// Enumeration guard for families that list every function on the domain.
pub const MAX_ENUMERATED_DOMAIN: u32 = 20;

/// Oracle sign value, `+1` or `-1`.
pub type Sign = i8;

#[inline]
pub(crate) fn domain_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn parity_sign(bits: u64) -> Sign {
    if bits.count_ones() & 1 == 1 {
        -1
    } else {
        1
    }
}

fn check_domain(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DOMAIN {
        return Err(Error::domain(format!(
            "domain size {n} outside 1..={MAX_DOMAIN}"
        )));
    }
    Ok(())
}

/// A function `{1..N} -> {-1,+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    domain_size: u32,
    mask: u64,
}

impl BooleanFunction {
    pub fn from_mask(domain_size: u32, mask: u64) -> Result<Self> {
        check_domain(domain_size)?;
        if mask & !domain_mask(domain_size) != 0 {
            return Err(Error::domain(format!(
                "mask {mask:#x} has bits outside a domain of size {domain_size}"
            )));
        }
        Ok(Self { domain_size, mask })
    }

    /// The constant `+1` function.
    pub fn constant_one(domain_size: u32) -> Result<Self> {
        Self::from_mask(domain_size, 0)
    }

    /// Builds a function from its values `F(1), .., F(N)`.
    pub fn from_signs(signs: &[Sign]) -> Result<Self> {
        let n = u32::try_from(signs.len()).unwrap_or(u32::MAX);
        check_domain(n)?;
        let mut mask = 0u64;
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => mask |= 1 << i,
                other => {
                    return Err(Error::domain(format!("value {other} is not a sign")))
                }
            }
        }
        Ok(Self {
            domain_size: n,
            mask,
        })
    }

    #[inline]
    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    /// Bit `x-1` set iff `F(x) = -1`.
    #[inline]
    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// `F(x)` for `x` in `0..=N`, with `F(0) = +1`.
    pub fn evaluate(&self, x: u32) -> Result<Sign> {
        if x > self.domain_size {
            return Err(Error::domain(format!(
                "point {x} outside 0..={}",
                self.domain_size
            )));
        }
        Ok(self.value(x))
    }

    /// Unchecked variant of [`evaluate`](Self::evaluate); `x` must be `<= N`.
    #[inline]
    pub fn value(&self, x: u32) -> Sign {
        debug_assert!(x <= self.domain_size);
        if x == 0 || self.mask >> (x - 1) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    /// Pointwise product, which is XOR on masks.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.domain_size != other.domain_size {
            return Err(Error::domain("product of functions on different domains"));
        }
        Ok(Self {
            domain_size: self.domain_size,
            mask: self.mask ^ other.mask,
        })
    }

    /// Iterates every function on a domain in mask order.
    pub fn all(domain_size: u32) -> Result<impl Iterator<Item = BooleanFunction>> {
        check_domain(domain_size)?;
        if domain_size > MAX_ENUMERATED_DOMAIN {
            return Err(Error::capacity(format!(
                "enumerating 2^{domain_size} functions exceeds the limit of 2^{MAX_ENUMERATED_DOMAIN}"
            )));
        }
        Ok((0..1u64 << domain_size).map(move |mask| BooleanFunction { domain_size, mask }))
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 1..=self.domain_size {
            f.write_str(if self.value(x) < 0 { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;

    /// Parses `"+-+"`, where character `i` is `F(i+1)`.
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::validation(format!(
                    "invalid character {other:?} in function string {s:?}"
                ))),
            })
            .collect::<Result<Vec<Sign>>>()?;
        Self::from_signs(&signs)
    }
}

/// A subset `S ⊆ {1..N}` in the same bit encoding as [`BooleanFunction`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(pub u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// Builds a subset from 1-based elements.
    pub fn from_elements(elements: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &x in elements {
            if x == 0 || x > MAX_DOMAIN {
                return Err(Error::domain(format!("subset element {x} outside 1..=64")));
            }
            bits |= 1 << (x - 1);
        }
        Ok(SubsetMask(bits))
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// 1-based elements in increasing order.
    pub fn elements(&self) -> Vec<u32> {
        let mut bits = self.0;
        let mut out = Vec::with_capacity(self.len() as usize);
        while bits != 0 {
            out.push(bits.trailing_zeros() + 1);
            bits &= bits - 1;
        }
        out
    }

    /// The `i`-th smallest element (1-based `i`), or `0` when `|S| < i`.
    pub fn nth_element(&self, i: u32) -> u32 {
        let mut bits = self.0;
        for _ in 1..i {
            if bits == 0 {
                return 0;
            }
            bits &= bits - 1;
        }
        if bits == 0 {
            0
        } else {
            bits.trailing_zeros() + 1
        }
    }

    pub fn fits(&self, domain_size: u32) -> bool {
        self.0 & !domain_mask(domain_size) == 0
    }
}

/// Character `chi_S(F) = prod_{x in S} F(x)`, `+1` for the empty set.
pub fn chi(subset: SubsetMask, f: &BooleanFunction) -> Result<Sign> {
    if !subset.fits(f.domain_size()) {
        return Err(Error::domain(format!(
            "subset {:?} not contained in 1..={}",
            subset.elements(),
            f.domain_size()
        )));
    }
    Ok(chi_bits(subset.0, f.mask()))
}

/// Character on raw masks, no domain check.
#[inline]
pub fn chi_bits(subset: u64, function: u64) -> Sign {
    parity_sign(subset & function)
}

/// Generator for the standard families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `G_j(x) = -1` iff `x = j`, for `j` in `1..=N`.
    Grover { domain_size: u32 },
    /// `f_a(x) = (-1)^{a.x}` on `N = 2^n - 1`, for `a` in `0..=N`.
    Characters { n: u32 },
    /// All `2^N` functions in mask order.
    All { domain_size: u32 },
}

/// An ordered list of distinct functions on a common domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionFamily {
    domain_size: u32,
    members: Vec<BooleanFunction>,
}

impl FunctionFamily {
    /// Validates and wraps an explicit member list. Duplicates are rejected.
    pub fn new(members: Vec<BooleanFunction>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::validation("a family needs at least one member"))?;
        let domain_size = first.domain_size();
        let mut seen = HashSet::with_capacity(members.len());
        for (i, f) in members.iter().enumerate() {
            if f.domain_size() != domain_size {
                return Err(Error::validation(format!(
                    "member {i} has domain size {} but the family uses {domain_size}",
                    f.domain_size()
                )));
            }
            if !seen.insert(f.mask()) {
                return Err(Error::validation(format!("member {i} ({f}) is a duplicate")));
            }
        }
        Ok(Self {
            domain_size,
            members,
        })
    }

    pub fn from_masks(domain_size: u32, masks: &[u64]) -> Result<Self> {
        let members = masks
            .iter()
            .map(|&m| BooleanFunction::from_mask(domain_size, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn make(kind: FamilyKind) -> Result<Self> {
        match kind {
            FamilyKind::Grover { domain_size } => {
                check_domain(domain_size)?;
                let members = (0..domain_size)
                    .map(|j| BooleanFunction {
                        domain_size,
                        mask: 1 << j,
                    })
                    .collect();
                Self::new(members)
            }
            FamilyKind::Characters { n } => {
                if n == 0 || n > 6 {
                    return Err(Error::parameter(format!(
                        "character family needs 1 <= n <= 6, got {n}"
                    )));
                }
                let domain_size = (1u32 << n) - 1;
                let members = (0..=u64::from(domain_size))
                    .map(|a| {
                        // bit x-1 of the mask holds the parity of a.x
                        let mask = (1..=u64::from(domain_size))
                            .filter(|&x| (a & x).count_ones() & 1 == 1)
                            .fold(0u64, |m, x| m | 1 << (x - 1));
                        BooleanFunction { domain_size, mask }
                    })
                    .collect();
                Self::new(members)
            }
            FamilyKind::All { domain_size } => Self::new(BooleanFunction::all(domain_size)?.collect()),
        }
    }

    /// Character family for `N = 2^n - 1` given the domain size directly.
    pub fn characters_for_domain(domain_size: u32) -> Result<Self> {
        let plus_one = domain_size.checked_add(1).unwrap_or(0);
        if !plus_one.is_power_of_two() || domain_size == 0 {
            return Err(Error::parameter(format!(
                "character family needs N + 1 to be a power of two, got N = {domain_size}"
            )));
        }
        Self::make(FamilyKind::Characters {
            n: plus_one.trailing_zeros(),
        })
    }

    #[inline]
    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn members(&self) -> &[BooleanFunction] {
        &self.members
    }

    pub fn position(&self, f: &BooleanFunction) -> Option<usize> {
        self.members.iter().position(|g| g == f)
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            domain_size: self.domain_size,
            functions: self.members.iter().map(|f| f.to_string()).collect(),
        }
    }

    pub fn from_file(file: &FamilyFile) -> Result<Self> {
        let members = file
            .functions
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.chars().count() != file.domain_size as usize {
                    return Err(Error::validation(format!(
                        "function {i} ({s:?}) has length {} but domain_size is {}",
                        s.chars().count(),
                        file.domain_size
                    )));
                }
                s.parse::<BooleanFunction>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("family serializes")
    }
}

/// On-disk form: `{"domain_size": N, "functions": ["++-", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub domain_size: u32,
    pub functions: Vec<String>,
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ZERO};
use crate::oracle::{BooleanFunction, Sign, MAX_DOMAIN};

/// Which basis the oracle is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    /// `|x, q, w>` with the oracle sending `q -> q F(x)`.
    #[serde(rename = "bitflip")]
    BitFlip,
    /// Oracle eigenbasis: `|x>` picks up `F(x)`, `|0>` and the auxiliary
    /// symmetric labels are fixed.
    Phase,
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Picture::BitFlip => "bitflip",
            Picture::Phase => "phase",
        })
    }
}

impl FromStr for Picture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bitflip" => Ok(Picture::BitFlip),
            "phase" => Ok(Picture::Phase),
            other => Err(Error::validation(format!("unknown picture {other:?}"))),
        }
    }
}

/// One element of the orthonormal basis of a [`Space`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// `|x, q, w>`, `x` in `1..=N`.
    BitFlip { x: u32, q: Sign, w: usize },
    /// `|x> (x) |w>`, `x` in `0..=N`. `x = 0` is `(|1,+1> + |1,-1>)/sqrt2`,
    /// `x >= 1` is `(|x,+1> - |x,-1>)/sqrt2`.
    Phase { x: u32, w: usize },
    /// `0_x = (|x,+1> + |x,-1>)/sqrt2` for `x` in `2..=N`, oracle eigenvalue `+1`.
    PhaseAux { x: u32, w: usize },
}

/// The Hilbert space of a query algorithm: `2 N W` dimensions in either
/// picture.
///
/// Index layout is `slot * W + w`. Bit-flip slots are `2(x-1) + [q = -1]`.
/// Phase slots are `0..=N` for `|x>` followed by `N+1 ..= 2N-1` for the
/// auxiliary labels `0_2 .. 0_N`, so the first `(N+1) W` indices form the
/// core block used by compact phase-picture constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    picture: Picture,
    domain_size: u32,
    workspace: usize,
}

impl Space {
    pub fn new(picture: Picture, domain_size: u32, workspace: usize) -> Result<Self> {
        if domain_size == 0 || domain_size > MAX_DOMAIN {
            return Err(Error::domain(format!("domain size {domain_size} outside 1..=64")));
        }
        if workspace == 0 {
            return Err(Error::parameter("workspace dimension must be at least 1"));
        }
        (2 * domain_size as usize)
            .checked_mul(workspace)
            .ok_or_else(|| Error::capacity("state dimension overflows"))?;
        Ok(Self {
            picture,
            domain_size,
            workspace,
        })
    }

    #[inline]
    pub fn picture(&self) -> Picture {
        self.picture
    }
    #[inline]
    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }
    #[inline]
    pub fn workspace(&self) -> usize {
        self.workspace
    }
    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.domain_size as usize * self.workspace
    }
    /// Size of the `|x> (x) |w>`, `x in 0..=N`, block in the phase picture.
    #[inline]
    pub fn core_dim(&self) -> usize {
        (self.domain_size as usize + 1) * self.workspace
    }

    pub fn with_picture(&self, picture: Picture) -> Self {
        Self { picture, ..*self }
    }

    pub fn label(&self, index: usize) -> Result<BasisLabel> {
        if index >= self.dim() {
            return Err(Error::domain(format!("basis index {index} >= {}", self.dim())));
        }
        let (slot, w) = (index / self.workspace, index % self.workspace);
        let n = self.domain_size as usize;
        Ok(match self.picture {
            Picture::BitFlip => BasisLabel::BitFlip {
                x: (slot / 2 + 1) as u32,
                q: if slot % 2 == 0 { 1 } else { -1 },
                w,
            },
            Picture::Phase if slot <= n => BasisLabel::Phase { x: slot as u32, w },
            Picture::Phase => BasisLabel::PhaseAux {
                x: (slot + 1 - n) as u32,
                w,
            },
        })
    }

    pub fn index(&self, label: BasisLabel) -> Result<usize> {
        let n = self.domain_size;
        let (slot, w) = match (self.picture, label) {
            (Picture::BitFlip, BasisLabel::BitFlip { x, q, w }) if (1..=n).contains(&x) && q.abs() == 1 => {
                (2 * (x as usize - 1) + usize::from(q < 0), w)
            }
            (Picture::Phase, BasisLabel::Phase { x, w }) if x <= n => (x as usize, w),
            (Picture::Phase, BasisLabel::PhaseAux { x, w }) if (2..=n).contains(&x) => {
                ((n + x - 1) as usize, w)
            }
            _ => {
                return Err(Error::model(format!(
                    "label {label:?} does not belong to the {} picture with N = {n}",
                    self.picture
                )))
            }
        };
        if w >= self.workspace {
            return Err(Error::domain(format!("workspace index {w} >= {}", self.workspace)));
        }
        Ok(slot * self.workspace + w)
    }

    /// Standard basis vector for `label`.
    pub fn basis_vector(&self, label: BasisLabel) -> Result<CVector> {
        let mut v = CVector::zeros(self.dim());
        v[self.index(label)?] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// Phase-picture slot holding the symmetric combination for `x`.
    #[inline]
    fn symmetric_slot(&self, x: usize) -> usize {
        if x == 1 {
            0
        } else {
            self.domain_size as usize + x - 1
        }
    }

    /// In-place oracle application for `f` in this space's picture.
    pub fn apply_oracle(&self, amplitudes: &mut [C64], f: &BooleanFunction) -> Result<()> {
        if f.domain_size() != self.domain_size {
            return Err(Error::model(format!(
                "function on domain {} applied to a space with N = {}",
                f.domain_size(),
                self.domain_size
            )));
        }
        if amplitudes.len() != self.dim() {
            return Err(Error::model(format!(
                "state of dimension {} in a space of dimension {}",
                amplitudes.len(),
                self.dim()
            )));
        }
        let w = self.workspace;
        let mut mask = f.mask();
        while mask != 0 {
            let x = mask.trailing_zeros() as usize + 1;
            mask &= mask - 1;
            match self.picture {
                Picture::BitFlip => {
                    let plus = 2 * (x - 1) * w;
                    let (head, tail) = amplitudes.split_at_mut(plus + w);
                    head[plus..].swap_with_slice(&mut tail[..w]);
                }
                Picture::Phase => {
                    for z in &mut amplitudes[x * w..(x + 1) * w] {
                        *z = -*z;
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-expresses amplitudes given in this space's picture in `target`.
    pub fn convert_amplitudes(&self, amplitudes: &[C64], target: Picture) -> Result<CVector> {
        if amplitudes.len() != self.dim() {
            return Err(Error::model("amplitude vector does not match the space"));
        }
        let mut out = CVector::from_column_slice(amplitudes);
        if target == self.picture {
            return Ok(out);
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let w = self.workspace;
        for x in 1..=self.domain_size as usize {
            let plus = 2 * (x - 1) * w;
            let minus = plus + w;
            let anti = x * w;
            let sym = self.symmetric_slot(x) * w;
            for j in 0..w {
                match self.picture {
                    Picture::BitFlip => {
                        let (a, b) = (amplitudes[plus + j], amplitudes[minus + j]);
                        out[sym + j] = (a + b) * r;
                        out[anti + j] = (a - b) * r;
                    }
                    Picture::Phase => {
                        let (s, a) = (amplitudes[sym + j], amplitudes[anti + j]);
                        out[plus + j] = (s + a) * r;
                        out[minus + j] = (s - a) * r;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Unitary `C` with `C v_self = v_target` for every vector.
    pub fn conversion_matrix(&self, target: Picture) -> Result<CMatrix> {
        let d = self.dim();
        let mut c = CMatrix::from_element(d, d, ZERO);
        let mut e = vec![ZERO; d];
        for j in 0..d {
            e[j] = C64::new(1.0, 0.0);
            let col = self.convert_amplitudes(&e, target)?;
            c.set_column(j, &col);
            e[j] = ZERO;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state, unitarity_defect};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vec_close(a: &CVector, b: &CVector, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn labels_round_trip() {
        for picture in [Picture::BitFlip, Picture::Phase] {
            let space = Space::new(picture, 3, 2).unwrap();
            assert_eq!(space.dim(), 12);
            for i in 0..space.dim() {
                let label = space.label(i).unwrap();
                assert_eq!(space.index(label).unwrap(), i);
            }
        }
    }

    #[test]
    fn bitflip_oracle_moves_q() {
        let space = Space::new(Picture::BitFlip, 3, 1).unwrap();
        let f = BooleanFunction::from_signs(&[1, -1, 1]).unwrap();
        let mut v: Vec<C64> = space
            .basis_vector(BasisLabel::BitFlip { x: 2, q: 1, w: 0 })
            .unwrap()
            .iter()
            .copied()
            .collect();
        space.apply_oracle(&mut v, &f).unwrap();
        let expected = space.basis_vector(BasisLabel::BitFlip { x: 2, q: -1, w: 0 }).unwrap();
        assert!(vec_close(&CVector::from_vec(v), &expected, 0.0));
    }

    #[test]
    fn oracle_is_involution_and_identity_for_plus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = BooleanFunction::from_mask(4, 0b1011).unwrap();
        let one = BooleanFunction::constant_one(4).unwrap();
        for picture in [Picture::BitFlip, Picture::Phase] {
            let space = Space::new(picture, 4, 3).unwrap();
            let psi = random_state(&mut rng, space.dim());
            let mut v: Vec<C64> = psi.iter().copied().collect();
            space.apply_oracle(&mut v, &one).unwrap();
            assert!(vec_close(&CVector::from_vec(v.clone()), &psi, 0.0));
            space.apply_oracle(&mut v, &f).unwrap();
            space.apply_oracle(&mut v, &f).unwrap();
            assert!(vec_close(&CVector::from_vec(v), &psi, 0.0));
        }
    }

    #[test]
    fn conversion_examples() {
        let bit = Space::new(Picture::BitFlip, 3, 1).unwrap();
        let phase = bit.with_picture(Picture::Phase);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = bit.basis_vector(BasisLabel::BitFlip { x: 1, q: 1, w: 0 }).unwrap();
        let minus = bit.basis_vector(BasisLabel::BitFlip { x: 1, q: -1, w: 0 }).unwrap();
        let anti: CVector = (&plus - &minus) * C64::new(r, 0.0);
        let sym: CVector = (&plus + &minus) * C64::new(r, 0.0);
        let got = bit.convert_amplitudes(anti.as_slice(), Picture::Phase).unwrap();
        assert!(vec_close(&got, &phase.basis_vector(BasisLabel::Phase { x: 1, w: 0 }).unwrap(), 1e-15));
        let got = bit.convert_amplitudes(sym.as_slice(), Picture::Phase).unwrap();
        assert!(vec_close(&got, &phase.basis_vector(BasisLabel::Phase { x: 0, w: 0 }).unwrap(), 1e-15));
    }

    #[test]
    fn conversion_is_unitary_and_intertwines_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let bit = Space::new(Picture::BitFlip, 3, 2).unwrap();
        let c = bit.conversion_matrix(Picture::Phase).unwrap();
        assert!(unitarity_defect(&c) < 1e-14);
        let psi = random_state(&mut rng, bit.dim());
        let there = bit.convert_amplitudes(psi.as_slice(), Picture::Phase).unwrap();
        let back = bit
            .with_picture(Picture::Phase)
            .convert_amplitudes(there.as_slice(), Picture::BitFlip)
            .unwrap();
        assert!(vec_close(&back, &psi, 1e-14));

        let f = BooleanFunction::from_mask(3, 0b110).unwrap();
        let mut a: Vec<C64> = psi.iter().copied().collect();
        bit.apply_oracle(&mut a, &f).unwrap();
        let lhs = bit.convert_amplitudes(&a, Picture::Phase).unwrap();
        let mut rhs: Vec<C64> = there.iter().copied().collect();
        bit.with_picture(Picture::Phase).apply_oracle(&mut rhs, &f).unwrap();
        assert!(vec_close(&lhs, &CVector::from_vec(rhs), 1e-14));
    }

    #[test]
    fn mismatched_function_is_model_error() {
        let space = Space::new(Picture::Phase, 3, 1).unwrap();
        let f = BooleanFunction::constant_one(2).unwrap();
        let mut v = vec![ZERO; space.dim()];
        assert!(matches!(space.apply_oracle(&mut v, &f), Err(Error::Model(_))));
    }
}

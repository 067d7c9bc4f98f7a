use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::oracle::BooleanFunction;

use super::operator::Operator;
use super::space::{Picture, Space};

/// Normalization tolerance for states.
pub const NORM_TOL: f64 = 1e-12;

/// Accepted deviation of a supplied initial state from unit norm.
const INITIAL_NORM_TOL: f64 = 1e-10;

/// Amplitude vector over an explicit labeled basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    pub space: Space,
    pub amplitudes: CVector,
}

impl QuantumState {
    pub fn new(space: Space, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::model(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn apply_oracle(&self, f: &BooleanFunction) -> Result<QuantumState> {
        let mut out = self.clone();
        out.space.apply_oracle(out.amplitudes.as_mut_slice(), f)?;
        Ok(out)
    }

    /// Oracle application that insists on the bit-flip picture.
    pub fn apply_oracle_bitflip(&self, f: &BooleanFunction) -> Result<QuantumState> {
        self.require(Picture::BitFlip)?;
        self.apply_oracle(f)
    }

    /// Oracle application that insists on the phase picture.
    pub fn apply_oracle_phase(&self, f: &BooleanFunction) -> Result<QuantumState> {
        self.require(Picture::Phase)?;
        self.apply_oracle(f)
    }

    fn require(&self, picture: Picture) -> Result<()> {
        if self.space.picture() != picture {
            return Err(Error::model(format!(
                "state is in the {} picture, expected {picture}",
                self.space.picture()
            )));
        }
        Ok(())
    }

    /// Same vector written in the other basis.
    pub fn convert_picture(&self, target: Picture) -> Result<QuantumState> {
        let amplitudes = self
            .space
            .convert_amplitudes(self.amplitudes.as_slice(), target)?;
        Ok(QuantumState {
            space: self.space.with_picture(target),
            amplitudes,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Initial state plus `k` unitaries interleaved with `k` oracle calls:
/// `|psi_F> = V_k F V_{k-1} ... V_1 F |s>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Algorithm {
    space: Space,
    initial: CVector,
    unitaries: Vec<Operator>,
}

impl Algorithm {
    pub fn new(space: Space, initial: CVector, unitaries: Vec<Operator>) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::validation("an algorithm needs at least one query"));
        }
        if initial.len() != space.dim() {
            return Err(Error::model(format!(
                "initial state of dimension {} in a space of dimension {}",
                initial.len(),
                space.dim()
            )));
        }
        let norm = initial.norm();
        if (norm - 1.0).abs() > INITIAL_NORM_TOL {
            return Err(Error::validation(format!("initial state has norm {norm}")));
        }
        for (i, op) in unitaries.iter().enumerate() {
            op.validate(space.dim()).map_err(|e| match e {
                Error::Validation(msg) => Error::validation(format!("V_{}: {msg}", i + 1)),
                Error::Model(msg) => Error::model(format!("V_{}: {msg}", i + 1)),
                other => other,
            })?;
        }
        Ok(Self {
            space,
            initial,
            unitaries,
        })
    }

    #[inline]
    pub fn space(&self) -> &Space {
        &self.space
    }
    #[inline]
    pub fn k(&self) -> usize {
        self.unitaries.len()
    }
    #[inline]
    pub fn initial(&self) -> &CVector {
        &self.initial
    }
    #[inline]
    pub fn unitaries(&self) -> &[Operator] {
        &self.unitaries
    }

    /// Final state for oracle `f`, oracle applied first.
    pub fn run(&self, f: &BooleanFunction) -> Result<QuantumState> {
        let mut v = self.initial.clone();
        for op in &self.unitaries {
            self.space.apply_oracle(v.as_mut_slice(), f)?;
            op.apply(&mut v);
        }
        QuantumState::new(self.space, v)
    }

    /// Like [`run`](Self::run) but also returns the state after every step
    /// (oracle or unitary), starting with `|s>`.
    pub fn trace(&self, f: &BooleanFunction) -> Result<Vec<CVector>> {
        let mut v = self.initial.clone();
        let mut out = vec![v.clone()];
        for op in &self.unitaries {
            self.space.apply_oracle(v.as_mut_slice(), f)?;
            out.push(v.clone());
            op.apply(&mut v);
            out.push(v.clone());
        }
        Ok(out)
    }

    /// The same algorithm written in the other picture: `s' = C s`,
    /// `V' = C V C^dagger`. Densifies every unitary.
    pub fn convert_picture(&self, target: Picture) -> Result<Algorithm> {
        if target == self.space.picture() {
            return Ok(self.clone());
        }
        let c = self.space.conversion_matrix(target)?;
        let initial = &c * &self.initial;
        let dim = self.space.dim();
        let unitaries = self
            .unitaries
            .iter()
            .map(|op| Operator::Dense(&c * op.to_dense(dim) * c.adjoint()))
            .collect();
        Algorithm::new(self.space.with_picture(target), initial, unitaries)
    }

    /// Dense copies of every unitary.
    pub fn dense_unitaries(&self) -> Vec<CMatrix> {
        let dim = self.space.dim();
        self.unitaries.iter().map(|op| op.to_dense(dim)).collect()
    }
}
